#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sslab {

/// Parameters of the self-similar interval and its measure.
///
/// The interval I = [0,1] is split by Psi1(x) = alpha x and
/// Psi2(x) = 1 - (1-alpha)(1-x). The measure puts weight w1 = 1-alpha on
/// the Psi1 cell and w2 = alpha on the Psi2 cell, which makes the operator
/// d/dm d/dx locally translation invariant.
struct ModelParams {
    double alpha = 0.5;
    double delta = 1.0;   ///< alpha / (1 - alpha)
    double gamma = 4.0;   ///< 1 / (alpha (1 - alpha)), the spectral scaling factor
    double w1 = 0.5;      ///< mass of Psi1(I)
    double w2 = 0.5;      ///< mass of Psi2(I)
    double M = 0.5;       ///< first moment of m
};

/// Builds all derived constants. Throws DomainError unless 0 < alpha < 1.
ModelParams derive_params(double alpha);

/// Second moment of m, from the fixed-point equation of the self-similar measure.
double second_moment(const ModelParams& params);

enum class TailKind { None, AllOne, AllTwo, NonStationary };

enum class BlowupClass { StationaryTo1, StationaryTo2, NonStationary, Undetermined };

std::string_view to_string(BlowupClass c);

/// A finite prefix of the blow-up sequence together with an explicitly
/// declared tail. Nothing about the tail is ever inferred from the prefix.
struct BlowupPrefix {
    std::vector<std::uint8_t> symbols;  ///< entries in {1, 2}
    TailKind tail = TailKind::None;

    static BlowupPrefix all_ones(std::size_t n);

    /// Parses "121:tail=1", "2:tail=alt", "11" (no tail), "" (empty).
    static BlowupPrefix parse(std::string_view text);
    std::string to_string() const;
    std::size_t size() const { return symbols.size(); }
};

/// A cell Psi_{w1} o ... o Psi_{wp}(I), seen inside I_<level>(omega).
struct CellAddress {
    std::size_t level = 0;
    std::vector<std::uint8_t> word;
};

struct Interval {
    double left = 0.0;
    double right = 1.0;
    double width() const { return right - left; }
    bool contains(const Interval& other) const {
        return left <= other.left && other.right <= right;
    }
};

/// Endpoints of Psi_{omega_1}^{-1} o ... o Psi_{omega_n}^{-1}(Psi_word(I)).
/// Throws LevelMismatchError when address.level exceeds the prefix length.
Interval cell_interval(const ModelParams& params, const BlowupPrefix& prefix,
                       const CellAddress& address);

/// m_<n> mass of the addressed cell.
double cell_mass(const ModelParams& params, const BlowupPrefix& prefix,
                 const CellAddress& address);

struct BlowupClassification {
    BlowupClass kind = BlowupClass::Undetermined;
    /// Finite boundary point of I_<inf>(omega); empty for non-stationary or undetermined tails.
    std::optional<double> boundary;
};

BlowupClassification classify_blowup(const ModelParams& params, const BlowupPrefix& prefix);

} // namespace sslab
