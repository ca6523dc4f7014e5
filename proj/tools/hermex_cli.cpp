#include "cli_app.hpp"

int main(int argc, char** argv) { return hermex::cli::run(argc, argv); }
