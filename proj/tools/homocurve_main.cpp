#include "homocurve/cli.hpp"

int main(int argc, char** argv) { return homocurve::cli::main(argc, argv); }
