#include "omls/config.hpp"

int main(int argc, char** argv) { return omls::cli_main(argc, argv); }
