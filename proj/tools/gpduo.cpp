#include <iostream>

#include "gpduo/cli.hpp"

int main(int argc, char** argv) { return gpduo::cli::dispatch(argc, argv, std::cout, std::cerr); }
