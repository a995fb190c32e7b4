#pragma once

#include <stdexcept>
#include <string>

namespace ogl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyGroup : public Error {
 public:
  using Error::Error;
};

class DuplicateIndex : public Error {
 public:
  using Error::Error;
};

class NonpositiveWeight : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// File parsing; line/column are 1-based, column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line, long column = 0)
      : Error(msg + " (line " + std::to_string(line) +
              (column > 0 ? ", column " + std::to_string(column) : "") + ")"),
        line_(line),
        column_(column) {}
  long line() const { return line_; }
  long column() const { return column_; }

 private:
  long line_;
  long column_;
};

class RaggedRows : public Error {
 public:
  using Error::Error;
};

class EmptyFile : public Error {
 public:
  using Error::Error;
};

class SpecInfeasible : public Error {
 public:
  using Error::Error;
};

class SingleClassLabels : public Error {
 public:
  using Error::Error;
};

class InfeasibleDual : public Error {
 public:
  using Error::Error;
};

class LineSearchOverflow : public Error {
 public:
  using Error::Error;
};

class OracleNotConverged : public Error {
 public:
  using Error::Error;
};

}  // namespace ogl
