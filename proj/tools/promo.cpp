#include "promo/cli.hpp"

int main(int argc, char** argv) { return promo::run_cli(argc, argv); }
