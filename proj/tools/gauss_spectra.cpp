#include <gauss_spectra/cli.hpp>

int main(int argc, char** argv) { return gauss_spectra::cli::run(argc, argv); }
