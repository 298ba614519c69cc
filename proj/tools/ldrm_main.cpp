#include "ldrm/cli.hpp"

int main(int argc, char** argv) { return ldrm::cli::run(argc, argv); }
