#include "sslab/cli.hpp"

#include "sslab/errors.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace sslab::cli {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string canonical(const RunConfig& c)
{
    // out, format, jobs and timing change where and how a result is written, not what it is
    const std::map<std::string, std::string> kv{
        {"alpha", num(c.alpha)},
        {"alphas", c.alphas},
        {"blowup", c.blowup},
        {"boundary", c.boundary},
        {"escape-radius", num(c.escape_radius)},
        {"grid", std::to_string(c.grid)},
        {"inject-fault", c.inject_fault ? "1" : "0"},
        {"level", std::to_string(c.level)},
        {"max-iter", std::to_string(c.max_iter)},
        {"mirror", c.mirror ? "1" : "0"},
        {"points", std::to_string(c.points)},
        {"resolution", std::to_string(c.resolution)},
        {"seed", std::to_string(c.seed)},
        {"tol", num(c.tol)},
        {"window", num(c.window_lo) + "," + num(c.window_hi)},
        {"xrange", num(c.x_lo) + "," + num(c.x_hi)},
        {"yrange", num(c.y_lo) + "," + num(c.y_hi)},
    };
    std::string out;
    for (const auto& [k, v] : kv)
        out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const RunConfig& config)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical(config)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> parse_alpha_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto slash = tok.find('/');
        try {
            std::size_t used = 0;
            double v;
            if (slash == std::string::npos) {
                v = std::stod(tok, &used);
                if (used != tok.size())
                    throw std::invalid_argument(tok);
            } else {
                const std::string a = tok.substr(0, slash), b = tok.substr(slash + 1);
                std::size_t ua = 0, ub = 0;
                v = std::stod(a, &ua) / std::stod(b, &ub);
                if (ua != a.size() || ub != b.size())
                    throw std::invalid_argument(tok);
            }
            out.push_back(v);
        } catch (const std::exception&) {
            throw DomainError("cannot parse alpha list entry '" + tok + "'");
        }
    }
    if (out.empty())
        throw DomainError("empty alpha list");
    return out;
}

void validate(const RunConfig& c)
{
    auto need = [](bool ok, const std::string& what) {
        if (!ok)
            throw DomainError(what);
    };
    need(c.alpha > 0.0 && c.alpha < 1.0, "--alpha must lie in (0,1)");
    need(c.level >= 0 && c.level <= 16, "--level must lie in [0,16]");
    need(c.window_lo < c.window_hi && c.window_hi <= 0.0, "--window needs a < b <= 0");
    need(c.tol > 0.0, "--tol must be positive");
    need(c.max_iter >= 1, "--max-iter must be >= 1");
    need(c.escape_radius > 1.0, "--escape-radius must exceed 1");
    need(c.format.empty() || c.format == "csv" || c.format == "json", "--format is csv or json");
    need(c.jobs >= 1 && c.jobs <= 256, "--jobs must lie in [1,256]");
    need(c.resolution >= 0 && c.resolution + c.level <= 24, "--resolution + --level must lie in [0,24]");
    need(c.points >= 1 && c.points <= 100000, "--points must lie in [1,100000]");
    need(c.boundary == "neumann" || c.boundary == "dirichlet", "--boundary is neumann or dirichlet");
    need(c.grid >= 2 && c.grid <= 2000, "--grid must lie in [2,2000]");
    need(c.x_lo < c.x_hi && c.y_lo < c.y_hi, "--xrange/--yrange need a < b");
    for (double a : parse_alpha_list(c.alphas))
        need(a > 0.0 && a < 1.0, "--alphas entries must lie in (0,1)");
}

} // namespace sslab::cli
