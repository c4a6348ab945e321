#include "routeplace/cli.hpp"

int main(int argc, char **argv) { return routeplace::dispatch(argc, argv); }
