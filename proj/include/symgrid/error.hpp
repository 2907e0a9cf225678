#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace symgrid {

/// 1-based line/column of a token in a model file.
struct SourceLoc {
    int line = 0;
    int column = 0;

    // Positions are annotations only: two ASTs that differ only in where their
    // nodes came from are structurally identical.
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

std::string to_string(const SourceLoc& loc);

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    SourceLoc loc;
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d, const std::string& file = {});
bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// Lexical, syntactic or semantic problem in a model file.
class ModelError : public std::runtime_error {
  public:
    ModelError(SourceLoc loc, const std::string& message);
    const SourceLoc& loc() const noexcept { return loc_; }
    const std::string& bare_message() const noexcept { return bare_; }

  private:
    SourceLoc loc_;
    std::string bare_;
};

class LexError : public ModelError {
    using ModelError::ModelError;
};

class ParseError : public ModelError {
    using ModelError::ModelError;
};

/// Failure while evaluating or differentiating an expression.
class EvalError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace symgrid
