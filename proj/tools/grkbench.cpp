#include "grk/cli.hpp"

int main(int argc, char** argv) { return grk::dispatch(argc, argv); }
