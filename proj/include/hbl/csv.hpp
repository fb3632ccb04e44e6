#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace hbl::csv {

// Shortest round-trip decimal representation; identical input bits give
// identical bytes, which is what the CSV determinism contract rests on.
std::string format(double v);
std::string format(std::int64_t v);
std::string format(bool v);

// Minimal writer: '#'-prefixed comment lines (self-describing header), one
// header row, then data rows. Gnuplot treats the comments as ignorable.
class Writer {
  public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void comment(std::string_view text);
    void header(std::initializer_list<std::string_view> cols);
    void row(std::initializer_list<std::string> cells);

  private:
    std::ostream& out_;
};

} // namespace hbl::csv
