#include "nftledger/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "nftledger/csv.hpp"
#include "nftledger/errors.hpp"

namespace nftledger {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

const std::vector<std::string> kTxHeader = {
    "collection", "token_id",    "tx_hash",   "timestamp", "price_native",
    "price_usd",  "currency",    "from_wallet", "to_wallet", "marketplace"};

const std::vector<std::string> kTraitHeader = {"token_id", "trait_type", "trait_value"};

}  // namespace

std::string_view to_string(Chain chain) {
    return chain == Chain::Ethereum ? "Ethereum" : "Solana";
}

std::string_view to_string(Currency currency) {
    return currency == Currency::ETH ? "ETH" : "SOL";
}

std::string_view to_string(PriceField field) {
    return field == PriceField::Native ? "native" : "usd";
}

std::optional<Chain> chain_from_string(std::string_view text) {
    std::string t = lower(text);
    if (t == "ethereum") return Chain::Ethereum;
    if (t == "solana") return Chain::Solana;
    return std::nullopt;
}

std::optional<Currency> currency_from_string(std::string_view text) {
    std::string t = lower(text);
    if (t == "eth") return Currency::ETH;
    if (t == "sol") return Currency::SOL;
    return std::nullopt;
}

std::optional<PriceField> price_field_from_string(std::string_view text) {
    std::string t = lower(text);
    if (t == "native") return PriceField::Native;
    if (t == "usd") return PriceField::Usd;
    return std::nullopt;
}

CollectionManifest parse_manifest(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed manifest: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("malformed manifest: expected an object");

    auto field = [&](const char* key) -> const nlohmann::json& {
        auto it = doc.find(key);
        if (it == doc.end())
            throw ParseError(std::string("malformed manifest: missing field '") + key + "'");
        return *it;
    };

    CollectionManifest m;
    if (!field("slug").is_string() || !field("name").is_string())
        throw ParseError("malformed manifest: slug and name must be strings");
    m.slug = field("slug").get<std::string>();
    m.name = field("name").get<std::string>();
    if (m.slug.empty()) throw ParseError("malformed manifest: empty slug");

    auto chain = chain_from_string(field("chain").is_string()
                                       ? field("chain").get<std::string>()
                                       : std::string());
    if (!chain) throw ParseError("unknown chain");
    m.chain = *chain;

    auto currency = currency_from_string(field("native_currency").is_string()
                                             ? field("native_currency").get<std::string>()
                                             : std::string());
    if (!currency) throw ParseError("unknown native currency");
    m.native_currency = *currency;

    if (!field("launch_date").is_string())
        throw ParseError("malformed manifest: launch_date must be a string");
    auto day = parse_date(field("launch_date").get<std::string>());
    if (!day) throw ParseError("malformed manifest: unparseable launch_date");
    m.launch_day = *day;

    if (!field("token_count").is_number_integer())
        throw ParseError("malformed manifest: token_count must be an integer");
    m.token_count = field("token_count").get<std::int64_t>();
    if (m.token_count <= 0) throw ParseError("non-positive token count");
    return m;
}

TransactionParseResult parse_transactions(std::istream& in,
                                          const CollectionManifest& manifest) {
    if (!in) throw ParseError("unreadable transactions stream");
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields != kTxHeader)
        throw ParseError("transactions header mismatch");

    TransactionParseResult result;
    auto& report = result.report;
    std::unordered_set<std::string> seen;  // tx_hash + '\x1f' + token_id
    const std::string currency_name(to_string(manifest.native_currency));
    const UnixSeconds launch_instant =
        static_cast<UnixSeconds>(manifest.launch_day) * kSecondsPerDay;

    while (auto row = reader.next()) {
        auto fail = [&](std::string reason) {
            report.error_entries.push_back({row->line, std::move(reason)});
        };
        if (row->fields.size() != kTxHeader.size()) {
            fail("wrong field count");
            continue;
        }
        const auto& f = row->fields;
        TransactionRecord rec;
        rec.collection = f[0];
        rec.token_id = f[1];
        rec.tx_hash = f[2];
        rec.from_wallet = f[7];
        rec.to_wallet = f[8];
        rec.marketplace = f[9];

        if (rec.collection != manifest.slug) {
            fail("collection does not match manifest slug");
            continue;
        }
        if (rec.token_id.empty()) {
            fail("empty token_id");
            continue;
        }
        if (rec.tx_hash.empty()) {
            fail("empty tx_hash");
            continue;
        }
        auto ts = parse_iso8601(f[3]);
        if (!ts) {
            fail("unparseable timestamp");
            continue;
        }
        rec.timestamp = *ts;
        if (rec.timestamp < launch_instant) {
            fail("timestamp precedes launch date");
            continue;
        }
        auto native = parse_double(f[4]);
        auto usd = parse_double(f[5]);
        if (!native || !usd) {
            fail("unparseable price");
            continue;
        }
        if (*native < 0 || *usd < 0) {
            fail("negative price");
            continue;
        }
        rec.price_native = *native;
        rec.price_usd = *usd;
        if (rec.from_wallet.empty() || rec.to_wallet.empty()) {
            fail("empty wallet address");
            continue;
        }
        if (f[6] != currency_name)
            report.warning_entries.push_back(
                {row->line, "currency differs from manifest native currency"});

        std::string key = rec.tx_hash + '\x1f' + rec.token_id;
        if (!seen.insert(std::move(key)).second) {
            ++result.duplicates_collapsed;
            report.warning_entries.push_back(
                {row->line, "duplicate tx_hash and token_id collapsed"});
            continue;
        }
        result.records.push_back(std::move(rec));
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const TransactionRecord& a, const TransactionRecord& b) {
                  return std::tie(a.timestamp, a.tx_hash, a.token_id) <
                         std::tie(b.timestamp, b.tx_hash, b.token_id);
              });
    report.record_count = result.records.size();
    return result;
}

TraitParseResult parse_traits(std::istream& in, const CollectionManifest&) {
    if (!in) throw ParseError("unreadable traits stream");
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields != kTraitHeader)
        throw ParseError("traits header mismatch");

    TraitParseResult result;
    std::set<std::string> trait_types;
    while (auto row = reader.next()) {
        if (row->fields.size() != kTraitHeader.size()) {
            result.report.error_entries.push_back({row->line, "wrong field count"});
            continue;
        }
        const std::string& token = row->fields[0];
        const std::string& type = row->fields[1];
        const std::string& value = row->fields[2];
        if (token.empty() || type.empty()) {
            result.report.error_entries.push_back({row->line, "empty token_id or trait_type"});
            continue;
        }
        if (value.empty()) {
            result.report.error_entries.push_back(
                {row->line, "empty trait_value (absence must be explicit \"None\")"});
            continue;
        }
        auto& entry = result.tokens[token];
        entry.token_id = token;
        auto [it, inserted] = entry.traits.emplace(type, value);
        if (!inserted) {
            if (it->second == value)
                result.report.warning_entries.push_back(
                    {row->line, "duplicate trait row collapsed"});
            else
                result.report.error_entries.push_back(
                    {row->line, "conflicting duplicate trait: " + token + "/" + type});
            continue;
        }
        trait_types.insert(type);
    }

    // Complete every token against the union of observed trait types.
    for (auto& [token, set] : result.tokens)
        for (const auto& type : trait_types)
            set.traits.emplace(type, "None");

    result.report.record_count = result.tokens.size();
    return result;
}

void write_transactions_csv(std::ostream& out,
                            std::span<const TransactionRecord> records,
                            const CollectionManifest& manifest) {
    write_csv_row(out, kTxHeader);
    const std::string currency(to_string(manifest.native_currency));
    for (const auto& rec : records) {
        std::vector<std::string> fields = {
            rec.collection,
            rec.token_id,
            rec.tx_hash,
            format_iso8601(rec.timestamp),
            format_double(rec.price_native),
            format_double(rec.price_usd),
            currency,
            rec.from_wallet,
            rec.to_wallet,
            rec.marketplace,
        };
        write_csv_row(out, fields);
    }
}

bool natural_less(std::string_view a, std::string_view b) {
    auto all_digits = [](std::string_view s) {
        return !s.empty() &&
               std::all_of(s.begin(), s.end(),
                           [](unsigned char c) { return std::isdigit(c); });
    };
    if (all_digits(a) && all_digits(b)) {
        // compare as unbounded integers: strip leading zeros, then by length
        auto strip = [](std::string_view s) {
            std::size_t i = s.find_first_not_of('0');
            return i == std::string_view::npos ? s.substr(s.size() - 1) : s.substr(i);
        };
        std::string_view sa = strip(a), sb = strip(b);
        if (sa.size() != sb.size()) return sa.size() < sb.size();
        if (sa != sb) return sa < sb;
        return a < b;  // "007" before "7"
    }
    return a < b;
}

}  // namespace nftledger
