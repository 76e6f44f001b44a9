#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

__attribute__((weak)) int main(int argc, char** argv) { return doctest::Context(argc, argv).run(); }
