#include "compvar/cli.hpp"

int main(int argc, char** argv) {
    return compvar::run_cli(argc, argv);
}
