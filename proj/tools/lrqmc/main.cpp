#include "lrqmc/commands.hpp"

int main(int argc, char** argv) { return lrqmc::cli::run(argc, argv); }
