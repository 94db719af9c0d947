#ifndef PAIRFACT_COMMON_HPP
#define PAIRFACT_COMMON_HPP

#include <charconv>
#include <stdexcept>
#include <string>
#include <system_error>

namespace pairfact {

// Error taxonomy used across the library. The CLI maps these to exit codes:
// ValidationError -> 2, NumericalError -> 3, LinkError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data: schemas, datasets, model files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Diverged optimization, non-finite objective values, and the like.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Probabilistic operation requested on a link that does not define one.
class LinkError : public Error {
 public:
  using Error::Error;
};

// Outcome of a hard pairwise prediction. Ties are explicit; scoring code
// converts them to 0.5 credit.
enum class Choice { first, second, tie };

inline const char* to_string(Choice c) {
  switch (c) {
    case Choice::first: return "first";
    case Choice::second: return "second";
    default: return "tie";
  }
}

// Shortest round-trip decimal form of a double. Used everywhere a number
// becomes text (CSV cells, JSON keys) so that identical inputs produce
// byte-identical files.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const char* what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ValidationError(std::string("invalid numeric literal '") + text +
                          "' in " + what);
  }
  return v;
}

}  // namespace pairfact

#endif  // PAIRFACT_COMMON_HPP
