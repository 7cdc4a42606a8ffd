#include "uphill/cli.hpp"

int main(int argc, char** argv) { return uphill::cli::run(argc, argv); }
