#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace surfpart {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ProjectionError : public Error {
 public:
  ProjectionError(std::size_t vertex, const std::string& what)
      : Error(what), vertex_(vertex) {}
  std::size_t vertex() const { return vertex_; }

 private:
  std::size_t vertex_;
};

class AssemblyError : public Error {
 public:
  AssemblyError(std::size_t triangle, const std::string& what)
      : Error(what), triangle_(triangle) {}
  std::size_t triangle() const { return triangle_; }

 private:
  std::size_t triangle_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class MeshMismatchError : public Error {
 public:
  using Error::Error;
};

class PreconditionerError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class ExtinctionError : public Error {
 public:
  ExtinctionError(std::size_t component, const std::string& what)
      : Error(what), component_(component) {}
  std::size_t component() const { return component_; }

 private:
  std::size_t component_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace surfpart
