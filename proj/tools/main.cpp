#include "cli.hpp"

int main(int argc, char** argv) { return ptinv::cli::dispatch(argc, argv); }
