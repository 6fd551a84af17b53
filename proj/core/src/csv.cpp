#include "bivirus/csv.hpp"

#include <charconv>
#include <cmath>

namespace bivirus {

namespace {

int significant_digits(const char* first, const char* last) {
    int count = 0;
    bool leading = true;
    for (const char* p = first; p != last; ++p) {
        const char c = *p;
        if (c == 'e' || c == 'E') break;
        if (c < '0' || c > '9') continue;
        if (leading && c == '0') continue;
        leading = false;
        ++count;
    }
    return count;
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    if (significant_digits(buf, res.ptr) > 12) {
        res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
    }
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, int n) {
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x1_" << i;
    for (int i = 1; i <= n; ++i) os << ",x2_" << i;
    os << "\n";
    for (size_t row = 0; row < traj.times.size(); ++row) {
        os << format_double(traj.times[row]);
        const Vector& s = traj.states[row];
        for (Eigen::Index i = 0; i < s.size(); ++i) os << "," << format_double(s(i));
        os << "\n";
    }
}

} // namespace bivirus
