#include "stable_est/cli.hpp"

int main(int argc, char** argv) { return stable_est::cli::run(argc, argv); }
