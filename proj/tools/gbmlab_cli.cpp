#include <iostream>

#include "gbmlab/lab.hpp"

int main(int argc, char** argv) {
    return gbmlab::lab_main(argc, argv, std::cout, std::cerr, gbmlab::default_registry());
}
