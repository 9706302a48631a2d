#include <hlab/cli.hpp>

int main(int argc, char** argv) { return hlab::cli::run(argc, argv); }
