#include "infoq/errors.hpp"

#include <sstream>

namespace infoq {

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
    : Error([&] {
        std::ostringstream os;
        os << "parse error at offset " << offset << " (column " << offset + 1 << "): " << message;
        if (!expected.empty()) {
          os << "; expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? " or " : "") << '"' << expected[i] << '"';
        }
        return os.str();
      }()),
      offset_(offset),
      expected_(std::move(expected)),
      detail_(message) {}

}  // namespace infoq
