#include "relwave/cli.hpp"

int main(int argc, char** argv) { return relwave::run(argc, argv); }
