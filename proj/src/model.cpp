#include "sslab/model.hpp"

#include "sslab/errors.hpp"

#include <cmath>

namespace sslab {

ModelParams derive_params(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    ModelParams p;
    p.alpha = alpha;
    p.delta = alpha / (1.0 - alpha);
    p.gamma = 1.0 / (alpha * (1.0 - alpha));
    p.w1 = 1.0 - alpha;
    p.w2 = alpha;
    p.M = alpha * alpha / (1.0 - 2.0 * alpha * (1.0 - alpha));
    return p;
}

double second_moment(const ModelParams& params)
{
    // M2 = w1 * alpha^2 M2 + w2 * E[(alpha + (1-alpha) x)^2]
    const double a = params.alpha;
    return (a * a * a + 2.0 * a * a * (1.0 - a) * params.M) / (1.0 - a * (1.0 - a));
}

std::string_view to_string(BlowupClass c)
{
    switch (c) {
    case BlowupClass::StationaryTo1: return "stationary-to-1";
    case BlowupClass::StationaryTo2: return "stationary-to-2";
    case BlowupClass::NonStationary: return "non-stationary";
    case BlowupClass::Undetermined: return "undetermined";
    }
    return "undetermined";
}

BlowupPrefix BlowupPrefix::all_ones(std::size_t n)
{
    BlowupPrefix b;
    b.symbols.assign(n, 1);
    b.tail = TailKind::AllOne;
    return b;
}

BlowupPrefix BlowupPrefix::parse(std::string_view text)
{
    BlowupPrefix b;
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    for (char ch : head) {
        if (ch == '1' || ch == '2')
            b.symbols.push_back(static_cast<std::uint8_t>(ch - '0'));
        else
            throw DomainError("blow-up symbols must be 1 or 2: '" + std::string(text) + "'");
    }
    if (colon == std::string_view::npos)
        return b;
    std::string_view tail = text.substr(colon + 1);
    if (tail.substr(0, 5) != "tail=")
        throw DomainError("expected 'tail=' after ':' in blow-up spec '" + std::string(text) + "'");
    tail.remove_prefix(5);
    if (tail == "1")
        b.tail = TailKind::AllOne;
    else if (tail == "2")
        b.tail = TailKind::AllTwo;
    else if (tail == "alt" || tail == "nonstationary")
        b.tail = TailKind::NonStationary;
    else if (tail == "none" || tail.empty())
        b.tail = TailKind::None;
    else
        throw DomainError("unknown blow-up tail '" + std::string(tail) + "'");
    return b;
}

std::string BlowupPrefix::to_string() const
{
    std::string s;
    for (auto v : symbols)
        s.push_back(static_cast<char>('0' + v));
    switch (tail) {
    case TailKind::AllOne: s += ":tail=1"; break;
    case TailKind::AllTwo: s += ":tail=2"; break;
    case TailKind::NonStationary: s += ":tail=alt"; break;
    case TailKind::None: break;
    }
    return s;
}

namespace {

double psi(const ModelParams& p, std::uint8_t j, double x)
{
    return j == 1 ? p.alpha * x : 1.0 - (1.0 - p.alpha) * (1.0 - x);
}

double psi_inv(const ModelParams& p, std::uint8_t j, double x)
{
    return j == 1 ? x / p.alpha : 1.0 - (1.0 - x) / (1.0 - p.alpha);
}

double weight(const ModelParams& p, std::uint8_t j)
{
    return j == 1 ? p.w1 : p.w2;
}

void check_symbols(const std::vector<std::uint8_t>& word)
{
    for (auto j : word)
        if (j != 1 && j != 2)
            throw DomainError("cell words use symbols 1 and 2 only");
}

void check_level(const BlowupPrefix& prefix, const CellAddress& address)
{
    if (address.level > prefix.size())
        throw LevelMismatchError("cell level " + std::to_string(address.level) +
                                 " exceeds blow-up prefix length " + std::to_string(prefix.size()));
    check_symbols(prefix.symbols);
    check_symbols(address.word);
}

} // namespace

Interval cell_interval(const ModelParams& params, const BlowupPrefix& prefix,
                       const CellAddress& address)
{
    check_level(prefix, address);
    double l = 0.0, r = 1.0;
    for (auto it = address.word.rbegin(); it != address.word.rend(); ++it) {
        l = psi(params, *it, l);
        r = psi(params, *it, r);
    }
    for (std::size_t k = address.level; k-- > 0;) {
        l = psi_inv(params, prefix.symbols[k], l);
        r = psi_inv(params, prefix.symbols[k], r);
    }
    return {l, r};
}

double cell_mass(const ModelParams& params, const BlowupPrefix& prefix,
                 const CellAddress& address)
{
    check_level(prefix, address);
    double mass = 1.0;
    for (std::size_t k = 0; k < address.level; ++k)
        mass /= weight(params, prefix.symbols[k]);
    for (auto j : address.word)
        mass *= weight(params, j);
    return mass;
}

BlowupClassification classify_blowup(const ModelParams& params, const BlowupPrefix& prefix)
{
    check_symbols(prefix.symbols);
    const CellAddress whole{prefix.size(), {}};
    switch (prefix.tail) {
    case TailKind::AllOne:
        return {BlowupClass::StationaryTo1, cell_interval(params, prefix, whole).left};
    case TailKind::AllTwo:
        return {BlowupClass::StationaryTo2, cell_interval(params, prefix, whole).right};
    case TailKind::NonStationary:
        return {BlowupClass::NonStationary, std::nullopt};
    case TailKind::None:
        break;
    }
    return {BlowupClass::Undetermined, std::nullopt};
}

} // namespace sslab
