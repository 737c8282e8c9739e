#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace csma {

// Computational-limit errors. The CLI maps these to exit code 2;
// plain std::invalid_argument (bad input) maps to exit code 1.

class cap_exceeded_error : public std::runtime_error {
public:
    cap_exceeded_error(std::size_t cap, double required_at_least, std::string what)
        : std::runtime_error(std::move(what)), cap_(cap), required_(required_at_least) {}

    std::size_t cap() const { return cap_; }
    double required_at_least() const { return required_; }

private:
    std::size_t cap_;
    double required_;
};

class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class periodic_chain_error : public convergence_error {
public:
    periodic_chain_error(int period, std::string what)
        : convergence_error(std::move(what)), period_(period) {}

    int period() const { return period_; }

private:
    int period_;
};

} // namespace csma
