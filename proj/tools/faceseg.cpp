#include "faceseg/cli.hpp"

int main(int argc, char** argv) { return faceseg::cli::run(argc, argv); }
