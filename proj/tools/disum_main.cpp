#include "disum/cli.hpp"

int main(int argc, char** argv) { return disum::run(argc, argv); }
