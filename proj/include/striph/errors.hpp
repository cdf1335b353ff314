#pragma once

#include <stdexcept>
#include <string>

namespace striph {

/// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorClass {
  config,     // bad input, bad arguments, malformed files
  numerical,  // non-finite values, divergent integrals
  contract    // a computed quantity violated its stated bound
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), class_(cls), code_(std::move(code)) {}

  ErrorClass error_class() const noexcept { return class_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorClass class_;
  std::string code_;
};

#define STRIPH_DEFINE_ERROR(Name, Cls)                                    \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(Cls, #Name, what) {}   \
  };

STRIPH_DEFINE_ERROR(BadArgument, ErrorClass::config)
STRIPH_DEFINE_ERROR(BadDimension, ErrorClass::config)
STRIPH_DEFINE_ERROR(InvalidIndex, ErrorClass::config)
STRIPH_DEFINE_ERROR(MissingDerivative, ErrorClass::config)
STRIPH_DEFINE_ERROR(EmptyCorpus, ErrorClass::config)
STRIPH_DEFINE_ERROR(NonzeroH, ErrorClass::config)
STRIPH_DEFINE_ERROR(BadBoundary, ErrorClass::config)
STRIPH_DEFINE_ERROR(MalformedCSV, ErrorClass::config)
STRIPH_DEFINE_ERROR(NonMonotoneAbscissae, ErrorClass::config)
STRIPH_DEFINE_ERROR(UnknownPreset, ErrorClass::config)
STRIPH_DEFINE_ERROR(NonFinite, ErrorClass::numerical)
STRIPH_DEFINE_ERROR(NotIntegrable, ErrorClass::numerical)
STRIPH_DEFINE_ERROR(Inconclusive, ErrorClass::contract)

#undef STRIPH_DEFINE_ERROR

}  // namespace striph
