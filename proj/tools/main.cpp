#include "teq/cli.hpp"

int main(int argc, char** argv) { return teq::run(argc, argv); }
