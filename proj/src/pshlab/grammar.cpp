#include "pshlab/grammar.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

namespace pshlab {

namespace {

struct Lexer {
    explicit Lexer(const std::string& s) : src(s) {}

    const std::string& src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (std::isspace(static_cast<unsigned char>(src[pos])) || src[pos] == ','))
            ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    void expect(char c) {
        skip_ws();
        if (pos >= src.size() || src[pos] != c)
            throw ParseError(std::string("expected '") + c + "' at offset " + std::to_string(pos) +
                             " in \"" + src + "\"");
        ++pos;
    }

    bool accept(char c) {
        skip_ws();
        if (pos < src.size() && src[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    std::string word() {
        skip_ws();
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        if (start == pos) throw ParseError("expected a word at offset " + std::to_string(pos));
        return src.substr(start, pos - start);
    }

    // A number can start the same way a word can't; peek for digit/sign/dot.
    bool next_is_number() {
        skip_ws();
        if (pos >= src.size()) return false;
        char c = src[pos];
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
    }

    double number() {
        skip_ws();
        const char* begin = src.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("expected a number at offset " + std::to_string(pos));
        pos += static_cast<std::size_t>(end - begin);
        return v;
    }

    int integer() {
        double v = number();
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) throw ParseError("expected an integer");
        return i;
    }
};

std::vector<double> numbers_until_close_or_word(Lexer& lx) {
    std::vector<double> out;
    while (lx.next_is_number()) out.push_back(lx.number());
    return out;
}

Poly parse_poly(Lexer& lx) {
    std::string kind = lx.word();
    if (kind == "poly") {
        std::vector<std::complex<double>> cs;
        for (double c : numbers_until_close_or_word(lx)) cs.emplace_back(c, 0.0);
        if (cs.empty()) throw ParseError("poly: needs coefficients");
        return Poly::univariate(1, 0, cs);
    }
    if (kind == "polyv") {
        int n = lx.integer();
        int var = lx.integer();
        std::vector<double> nums = numbers_until_close_or_word(lx);
        if (nums.empty() || nums.size() % 2 != 0)
            throw ParseError("polyv: needs re/im coefficient pairs");
        std::vector<std::complex<double>> cs;
        for (std::size_t i = 0; i < nums.size(); i += 2) cs.emplace_back(nums[i], nums[i + 1]);
        return Poly::univariate(n, var, cs);
    }
    if (kind == "polyn") {
        int n = lx.integer();
        int nterms = lx.integer();
        std::vector<PolyTerm> terms;
        for (int t = 0; t < nterms; ++t) {
            PolyTerm term;
            double re = lx.number(), im = lx.number();
            term.coeff = {re, im};
            for (int j = 0; j < n; ++j) {
                int e = lx.integer();
                if (e < 0 || e > 255) throw ParseError("polyn: exponent out of range");
                term.exp[j] = static_cast<std::uint8_t>(e);
            }
            terms.push_back(term);
        }
        return Poly(n, std::move(terms));
    }
    throw ParseError("unknown polynomial form: " + kind);
}

ConvexChi parse_chi(Lexer& lx) {
    std::string kind = lx.word();
    auto maybe_args = [&]() {
        std::vector<double> args;
        if (lx.accept('(')) {
            args = numbers_until_close_or_word(lx);
            lx.expect(')');
        }
        return args;
    };
    if (kind == "neginv") {
        auto a = maybe_args();
        return ConvexChi::neg_inverse(a.empty() ? 1.0 : a.at(0));
    }
    if (kind == "neglogneg") {
        auto a = maybe_args();
        return ConvexChi::neg_log_neg(a.empty() ? 1.0 : a.at(0));
    }
    if (kind == "negpow") {
        auto a = maybe_args();
        if (a.empty()) throw ParseError("negpow: needs alpha");
        return ConvexChi::neg_pow_neg(a.at(0), a.size() > 1 ? a.at(1) : 1.0);
    }
    if (kind == "itert") {
        auto a = maybe_args();
        if (a.size() < 2) throw ParseError("itert: needs m and gamma");
        return ConvexChi::iterated_t(static_cast<int>(a.at(0)), a.at(1));
    }
    if (kind == "affine") {
        auto a = maybe_args();
        if (a.size() < 2) throw ParseError("affine: needs slope and offset");
        return ConvexChi::affine(a.at(0), a.at(1));
    }
    throw ParseError("unknown chi kind: " + kind);
}

PshExpr parse_expr_inner(Lexer& lx) {
    std::string head = lx.word();
    lx.expect('(');
    PshExpr result;
    if (head == "const") {
        int n = lx.integer();
        double k = lx.number();
        result = make_const(n, k);
    } else if (head == "logabs") {
        result = make_log_abs_poly(parse_poly(lx));
    } else if (head == "lognorm") {
        int n = lx.integer();
        Point c = Point::zero(n);
        for (int i = 0; i < 2 * n; ++i) c.x[i] = lx.number();
        std::vector<int> sel;
        std::vector<double> weights;
        while (!lx.accept(')')) {
            std::string w = lx.word();
            if (w == "sel") {
                while (lx.next_is_number()) sel.push_back(lx.integer());
            } else if (w == "w") {
                while (lx.next_is_number()) weights.push_back(lx.number());
            } else {
                throw ParseError("lognorm: unexpected token " + w);
            }
        }
        if (sel.empty())
            for (int j = 0; j < n; ++j) sel.push_back(j);
        return make_log_norm(c, sel, weights);
    } else if (head == "sum") {
        std::vector<double> ws;
        std::vector<PshExpr> ch;
        while (lx.peek() != ')') {
            ws.push_back(lx.number());
            ch.push_back(parse_expr_inner(lx));
        }
        result = make_sum(std::move(ws), std::move(ch));
    } else if (head == "max") {
        std::vector<PshExpr> ch;
        while (lx.peek() != ')') ch.push_back(parse_expr_inner(lx));
        result = make_max(std::move(ch));
    } else if (head == "scale") {
        double c = lx.number();
        result = make_scale(c, parse_expr_inner(lx));
    } else if (head == "addconst") {
        double k = lx.number();
        result = make_add_const(k, parse_expr_inner(lx));
    } else if (head == "compose") {
        ConvexChi chi = parse_chi(lx);
        PshExpr child = parse_expr_inner(lx);
        result = compose_convex_unchecked(chi, child);
    } else {
        throw ParseError("unknown expression head: " + head);
    }
    lx.expect(')');
    return result;
}

Domain parse_domain_inner(Lexer& lx) {
    std::string head = lx.word();
    lx.expect('(');
    if (head == "ball") {
        std::vector<double> nums = numbers_until_close_or_word(lx);
        lx.expect(')');
        if (nums.size() < 3 || nums.size() % 2 == 0)
            throw ParseError("ball: expected 2n center coordinates and a radius");
        int n = static_cast<int>((nums.size() - 1) / 2);
        Point c = Point::zero(n);
        for (int i = 0; i < 2 * n; ++i) c.x[i] = nums[i];
        return Domain::ball(c, nums.back());
    }
    if (head == "polydisk") {
        std::vector<double> nums = numbers_until_close_or_word(lx);
        lx.expect(')');
        if (nums.empty() || nums.size() % 3 != 0)
            throw ParseError("polydisk: expected 2n center coordinates and n radii");
        int n = static_cast<int>(nums.size() / 3);
        Point c = Point::zero(n);
        for (int i = 0; i < 2 * n; ++i) c.x[i] = nums[i];
        std::vector<double> radii(nums.begin() + 2 * n, nums.end());
        return Domain::polydisk(c, radii);
    }
    if (head == "cusp") {
        double alpha = lx.number();
        lx.expect(')');
        return Domain::cusp(alpha);
    }
    if (head == "shrunk") {
        Domain inner = parse_domain_inner(lx);
        double margin = lx.number();
        lx.expect(')');
        return Domain::shrunk(std::move(inner), margin);
    }
    throw ParseError("unknown domain: " + head);
}

}  // namespace

PshExpr parse_expr(const std::string& text) {
    Lexer lx(text);
    PshExpr e = parse_expr_inner(lx);
    if (!lx.at_end()) throw ParseError("trailing input after expression");
    return e;
}

Domain parse_domain(const std::string& text) {
    Lexer lx(text);
    Domain d = parse_domain_inner(lx);
    if (!lx.at_end()) throw ParseError("trailing input after domain");
    return d;
}

std::string print_expr(const PshExpr& e) { return e.print(); }

}  // namespace pshlab
