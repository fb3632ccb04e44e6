#include "hbl/csv.hpp"

#include <charconv>

namespace hbl::csv {

std::string format(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format(std::int64_t v) { return std::to_string(v); }

std::string format(bool v) { return v ? "1" : "0"; }

void Writer::comment(std::string_view text) { out_ << "# " << text << "\n"; }

void Writer::header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
        if (!first) out_ << ",";
        out_ << c;
        first = false;
    }
    out_ << "\n";
}

void Writer::row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out_ << ",";
        out_ << c;
        first = false;
    }
    out_ << "\n";
}

} // namespace hbl::csv
