#include "keldysh/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
    keldysh::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--seed" && i + 1 < argc)
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
        else if (a == "--no-timing")
            opt.timing = false;
        else {
            std::fprintf(stderr, "usage: keldysh_accept [--seed N] [--no-timing]\n");
            return 2;
        }
    }
    auto r = keldysh::run_acceptance(opt);
    std::fputs(keldysh::format_report(r).c_str(), stdout);
    return keldysh::all_pass(r) ? 0 : 1;
}
