#include "qsl2/cli.hpp"

int main(int argc, char** argv) { return qsl2::run_cli(argc, argv); }
