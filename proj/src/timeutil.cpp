#include "nftledger/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace nftledger {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<DayNumber> civil_to_day(int y, int m, int d) {
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                       day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return static_cast<DayNumber>(sys_days{ymd}.time_since_epoch().count());
}

}  // namespace

std::optional<UnixSeconds> parse_iso8601(std::string_view text) {
    // Date part: YYYY-MM-DD
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y, mo, d;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    auto day = civil_to_day(y, mo, d);
    if (!day) return std::nullopt;

    std::int64_t secs = static_cast<std::int64_t>(*day) * kSecondsPerDay;
    std::string_view rest = text.substr(10);
    if (rest.empty()) return secs;

    if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
    rest.remove_prefix(1);
    if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':') return std::nullopt;
    int h, mi, s;
    if (!parse_int(rest.substr(0, 2), h) || !parse_int(rest.substr(3, 2), mi) ||
        !parse_int(rest.substr(6, 2), s))
        return std::nullopt;
    if (h > 23 || mi > 59 || s > 60 || h < 0 || mi < 0 || s < 0) return std::nullopt;
    if (s == 60) s = 59;  // clamp leap seconds
    secs += h * 3600 + mi * 60 + s;
    rest.remove_prefix(8);

    // Fractional seconds are accepted and truncated.
    if (!rest.empty() && rest[0] == '.') {
        rest.remove_prefix(1);
        std::size_t ndigits = 0;
        while (ndigits < rest.size() && rest[ndigits] >= '0' && rest[ndigits] <= '9')
            ++ndigits;
        if (ndigits == 0) return std::nullopt;
        rest.remove_prefix(ndigits);
    }

    if (rest.empty()) return secs;  // no offset: UTC
    if (rest == "Z" || rest == "z") return secs;
    if (rest[0] != '+' && rest[0] != '-') return std::nullopt;
    bool neg = rest[0] == '-';
    rest.remove_prefix(1);
    int oh, om = 0;
    if (rest.size() == 5 && rest[2] == ':') {
        if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(3, 2), om))
            return std::nullopt;
    } else if (rest.size() == 4) {
        if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(2, 2), om))
            return std::nullopt;
    } else if (rest.size() == 2) {
        if (!parse_int(rest, oh)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (oh > 18 || om > 59 || oh < 0 || om < 0) return std::nullopt;
    std::int64_t offset = oh * 3600 + om * 60;
    return neg ? secs + offset : secs - offset;
}

std::string format_iso8601(UnixSeconds ts) {
    DayNumber day = day_of(ts);
    std::int64_t rem = ts - static_cast<std::int64_t>(day) * kSecondsPerDay;
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    return buf;
}

std::optional<DayNumber> parse_date(std::string_view text) {
    int y, mo, d = 1;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
            !parse_int(text.substr(8, 2), d))
            return std::nullopt;
    } else if (text.size() == 7 && text[4] == '-') {
        if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo))
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    return civil_to_day(y, mo, d);
}

std::string format_date(DayNumber day) {
    using namespace std::chrono;
    year_month_day ymd{sys_days{days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DayNumber day_of(UnixSeconds ts) {
    std::int64_t d = ts / kSecondsPerDay;
    if (ts % kSecondsPerDay < 0) --d;  // floor for pre-epoch instants
    return static_cast<DayNumber>(d);
}

}  // namespace nftledger
