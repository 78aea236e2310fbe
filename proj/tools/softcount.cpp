#include "softcount_cli.hpp"

int main(int argc, char** argv) { return softcount::cli::run(argc, argv); }
