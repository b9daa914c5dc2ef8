#pragma once

#include <stdexcept>
#include <string>

namespace meadowprob {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lexical or grammatical failure; positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(col) + ")"),
          line_(line),
          col_(col) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

// Unknown generator, undeclared or duplicate name, unknown variable label.
class NameError : public Error {
public:
    using Error::Error;
};

// Generator count beyond the configured cap.
class CapError : public Error {
public:
    using Error::Error;
};

// Constraint that has no linear lowering over minterm weights.
class LoweringError : public Error {
public:
    using Error::Error;
};

} // namespace meadowprob
