#include "mch/cli.hpp"

int main(int argc, char** argv) { return mch::cli::run(argc, argv); }
