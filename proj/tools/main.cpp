#include "commands.hpp"

int main(int argc, char** argv) { return hkrig::cli::main_entry(argc, argv); }
