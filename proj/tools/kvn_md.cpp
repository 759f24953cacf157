#include "kvn/run.hpp"

int main(int argc, char** argv) { return kvn::cli_main(argc, argv); }
