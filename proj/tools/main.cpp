#include "config.hpp"
#include "run.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    try {
        const auto config = lvw::cli::parse_config(argc, argv);
        return lvw::cli::run(config, std::cout);
    } catch (const lvw::cli::HelpRequested& h) {
        std::cout << h.what();
        return 0;
    } catch (...) {
        return lvw::cli::report_error(std::cerr);
    }
}
