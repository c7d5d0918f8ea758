#include "almi/cli_app.hpp"

int main(int argc, char** argv) { return almi::cli::run_cli(argc, argv); }
