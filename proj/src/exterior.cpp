#include "combcalc/exterior.hpp"

#include <algorithm>

#include "combcalc/error.hpp"

namespace combcalc {

MultiIndex::MultiIndex(std::vector<int> positions) : positions_(std::move(positions)) {
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        if (positions_[i] < 0) throw DegreeError("multi-index position must be nonnegative");
        if (i > 0 && positions_[i] <= positions_[i - 1]) {
            throw DegreeError("multi-index must be strictly increasing");
        }
    }
}

std::optional<std::pair<MultiIndex, int>> MultiIndex::canonicalize(std::vector<int> positions) {
    // Insertion sort, counting transpositions for the sign.
    int sign = 1;
    for (std::size_t i = 1; i < positions.size(); ++i) {
        for (std::size_t j = i; j > 0 && positions[j - 1] >= positions[j]; --j) {
            if (positions[j - 1] == positions[j]) return std::nullopt;
            std::swap(positions[j - 1], positions[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < positions.size(); ++i) {
        if (positions[i] == positions[i - 1]) return std::nullopt;
    }
    return std::pair{MultiIndex(std::move(positions)), sign};
}

MultiIndex MultiIndex::top(const CombSpace& space) {
    std::vector<int> all(static_cast<std::size_t>(space.n()));
    for (int i = 0; i < space.n(); ++i) all[static_cast<std::size_t>(i)] = i;
    return MultiIndex(std::move(all));
}

bool MultiIndex::contains(int position) const { return slot_of(position) >= 0; }

int MultiIndex::slot_of(int position) const {
    const auto it = std::lower_bound(positions_.begin(), positions_.end(), position);
    if (it == positions_.end() || *it != position) return -1;
    return static_cast<int>(it - positions_.begin());
}

MultiIndex MultiIndex::without_slot(int slot) const {
    std::vector<int> rest = positions_;
    rest.erase(rest.begin() + slot);
    return MultiIndex(std::move(rest));
}

std::string to_string(const MultiIndex& index, const CombSpace& space) {
    if (index.degree() == 0) return "1";
    std::string out;
    for (int pos : index.positions()) {
        if (!out.empty()) out += '^';
        out += "d" + space.label(pos).name();
    }
    return out;
}

MultiIndex parse_multi_index(std::string_view text, const CombSpace& space) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    const std::string_view body = trim(text);
    if (body == "1") return MultiIndex();
    std::vector<int> positions;
    std::size_t start = 0;
    const std::size_t offset = static_cast<std::size_t>(body.data() - text.data());
    while (start <= body.size()) {
        std::size_t end = body.find('^', start);
        if (end == std::string_view::npos) end = body.size();
        const std::string_view piece = trim(body.substr(start, end - start));
        if (piece.size() < 3 || piece[0] != 'd') throw ParseError("expected dx<label>", offset + start);
        const Expr var = parse(piece.substr(1), space);
        if (var.kind() != ExprKind::Variable) throw ParseError("expected a coordinate after 'd'", offset + start);
        positions.push_back(space.index_of(var.label()));
        start = end + 1;
    }
    return MultiIndex(std::move(positions));
}

// DiffForm

DiffForm::DiffForm(CombSpace space, int degree) : space_(std::move(space)), degree_(degree) {
    if (degree_ < 0 || degree_ > space_.n()) {
        throw DegreeError("form degree " + std::to_string(degree_) + " outside [0, " + std::to_string(space_.n()) + "]");
    }
}

DiffForm::DiffForm(CombSpace space, int degree, const std::map<MultiIndex, Expr>& terms)
    : DiffForm(std::move(space), degree) {
    for (const auto& [index, coeff] : terms) {
        if (index.degree() != degree_) throw DegreeError("term degree does not match form degree");
        if (!index.positions().empty() && index.positions().back() >= space_.n()) {
            throw InvalidLabelError("multi-index position outside the space");
        }
        validate(coeff, space_);
        if (!coeff.is_zero()) terms_.emplace(index, coeff);
    }
}

DiffForm DiffForm::function(const CombSpace& space, Expr f) { return basis(space, MultiIndex(), std::move(f)); }

DiffForm DiffForm::basis(const CombSpace& space, MultiIndex index, Expr coefficient) {
    const int degree = index.degree();
    return DiffForm(space, degree, {{std::move(index), std::move(coefficient)}});
}

DiffForm DiffForm::volume(const CombSpace& space, Expr coefficient) {
    return basis(space, MultiIndex::top(space), std::move(coefficient));
}

Expr DiffForm::coefficient(const MultiIndex& index) const {
    const auto it = terms_.find(index);
    return it == terms_.end() ? Expr::constant(0.0) : it->second;
}

std::map<MultiIndex, double> DiffForm::evaluate(const Point& p) const {
    if (!(p.space() == space_)) throw SpaceMismatchError("form evaluated at a point of another space");
    std::map<MultiIndex, double> out;
    for (const auto& [index, coeff] : terms_) out.emplace(index, eval(coeff, p));
    return out;
}

// VectorField

VectorField::VectorField(CombSpace space) : space_(std::move(space)) {}

VectorField::VectorField(CombSpace space, std::map<int, Expr> components)
    : space_(std::move(space)) {
    for (auto& [pos, expr] : components) {
        if (pos < 0 || pos >= space_.n()) throw InvalidLabelError("vector field component outside the space");
        validate(expr, space_);
        if (!expr.is_zero()) components_.emplace(pos, std::move(expr));
    }
}

Expr VectorField::component(int position) const {
    const auto it = components_.find(position);
    return it == components_.end() ? Expr::constant(0.0) : it->second;
}

// Algebra

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return result;
}

std::uint64_t lambda_dim(const CombSpace& space, int l) {
    if (l < 0 || l > space.n()) throw DegreeError("l must lie in [0, n]");
    return binomial(space.n(), l);
}

namespace {

void require_same_space(const DiffForm& a, const DiffForm& b) {
    if (!(a.space() == b.space())) throw SpaceMismatchError("forms live on different spaces");
}

void accumulate(std::map<MultiIndex, Expr>& terms, const MultiIndex& index, const Expr& c) {
    auto [it, inserted] = terms.try_emplace(index, c);
    if (!inserted) it->second = it->second + c;
}

} // namespace

DiffForm add_forms(const DiffForm& a, const DiffForm& b) {
    require_same_space(a, b);
    if (a.degree() != b.degree()) throw DegreeError("cannot add forms of different degree");
    std::map<MultiIndex, Expr> terms = a.terms();
    for (const auto& [index, c] : b.terms()) accumulate(terms, index, c);
    return DiffForm(a.space(), a.degree(), terms);
}

DiffForm scale_form(const Expr& c, const DiffForm& a) {
    std::map<MultiIndex, Expr> terms;
    for (const auto& [index, coeff] : a.terms()) terms.emplace(index, c * coeff);
    return DiffForm(a.space(), a.degree(), terms);
}

DiffForm negate_form(const DiffForm& a) {
    std::map<MultiIndex, Expr> terms;
    for (const auto& [index, coeff] : a.terms()) terms.emplace(index, -coeff);
    return DiffForm(a.space(), a.degree(), terms);
}

DiffForm sub_forms(const DiffForm& a, const DiffForm& b) { return add_forms(a, negate_form(b)); }

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    require_same_space(a, b);
    const int degree = a.degree() + b.degree();
    if (degree > a.space().n()) return DiffForm(a.space(), a.space().n());
    std::map<MultiIndex, Expr> terms;
    for (const auto& [ia, ca] : a.terms()) {
        for (const auto& [ib, cb] : b.terms()) {
            std::vector<int> joined = ia.positions();
            joined.insert(joined.end(), ib.positions().begin(), ib.positions().end());
            const auto sorted = MultiIndex::canonicalize(std::move(joined));
            if (!sorted) continue;
            const Expr product = ca * cb;
            accumulate(terms, sorted->first, sorted->second > 0 ? product : -product);
        }
    }
    return DiffForm(a.space(), degree, terms);
}

DiffForm interior_product(const VectorField& x, const DiffForm& w) {
    if (!(x.space() == w.space())) throw SpaceMismatchError("vector field and form live on different spaces");
    if (w.degree() == 0) throw DegreeError("interior product of a 0-form");
    std::map<MultiIndex, Expr> terms;
    for (const auto& [index, c] : w.terms()) {
        for (int slot = 0; slot < index.degree(); ++slot) {
            const Expr xh = x.component(index.positions()[static_cast<std::size_t>(slot)]);
            if (xh.is_zero()) continue;
            const Expr term = xh * c;
            accumulate(terms, index.without_slot(slot), slot % 2 == 0 ? term : -term);
        }
    }
    return DiffForm(w.space(), w.degree() - 1, terms);
}

} // namespace combcalc
