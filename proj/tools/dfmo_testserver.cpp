// Line-protocol objective server used by the tests and as a template for
// external objectives. Reads one point per line, answers one line.
//
//   dfmo_testserver [remark_a1|identity|nan|err|garbage|short|silent]

#include <cstdio>
#include <iostream>
#include <string>

#include "dfmo/problems.hpp"
#include "dfmo/protocol.hpp"

int main(int argc, char** argv) {
    const std::string mode = argc > 1 ? argv[1] : "remark_a1";
    const auto problem = dfmo::problems::remark_a1();
    std::string line;
    while (std::getline(std::cin, line)) {
        dfmo::Vector x;
        try {
            x = dfmo::decode_line(line);
        } catch (const std::exception& e) {
            std::cout << "ERR " << e.what() << std::endl;
            continue;
        }
        if (mode == "remark_a1") {
            if (x.size() != 1) {
                std::cout << "ERR remark_a1 expects one coordinate" << std::endl;
                continue;
            }
            std::cout << dfmo::encode_line(problem.eval(x)) << std::flush;
        } else if (mode == "identity") {
            std::cout << dfmo::encode_line(x) << std::flush;
        } else if (mode == "nan") {
            std::cout << "nan 1" << std::endl;
        } else if (mode == "err") {
            std::cout << "ERR objective undefined here" << std::endl;
        } else if (mode == "garbage") {
            std::cout << "1.0 banana" << std::endl;
        } else if (mode == "short") {
            std::cout << "1.0" << std::endl;
        } else if (mode == "silent") {
            // never answers
        } else {
            std::cerr << "unknown mode " << mode << '\n';
            return 2;
        }
    }
    return 0;
}
