#include <cctype>
#include <map>
#include <sstream>

#include "anoncomp/compiler.hpp"

namespace anoncomp {

namespace {

enum class Tok { number, var, plus, minus, star, comma, le, lt, ge, gt, end };

struct Token {
  Tok kind = Tok::end;
  Rational number;
  int var = 0;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw SpecError("line " + std::to_string(line_) + ": " + message);
  }

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == text_.size()) return {};
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/')) {
        ++pos_;
      }
      try {
        return {Tok::number, parse_rational(text_.substr(start, pos_ - start)), 0};
      } catch (const std::exception&) {
        fail("bad number '" + std::string(text_.substr(start, pos_ - start)) + "'");
      }
    }
    if (c == 'p') {
      const std::size_t start = ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a value index after 'p'");
      return {Tok::var, 0, std::stoi(std::string(text_.substr(start, pos_ - start)))};
    }
    ++pos_;
    const bool eq = pos_ < text_.size() && text_[pos_] == '=';
    switch (c) {
      case '+': return {Tok::plus, 0, 0};
      case '-': return {Tok::minus, 0, 0};
      case '*': return {Tok::star, 0, 0};
      case ',': return {Tok::comma, 0, 0};
      case '<': pos_ += eq; return {eq ? Tok::le : Tok::lt, 0, 0};
      case '>': pos_ += eq; return {eq ? Tok::ge : Tok::gt, 0, 0};
      default: fail(std::string("unexpected character '") + c + "'");
    }
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

/// constant + sum coefficient[k] p_k, k = 0..K
struct LinearForm {
  std::vector<Rational> coefficient;
  Rational constant = 0;
};

class ClauseParser {
 public:
  ClauseParser(std::string_view text, std::size_t line, int alphabet_max)
      : lex_(text, line), alphabet_max_(alphabet_max) {
    advance();
  }

  Clause parse() {
    Clause clause;
    for (;;) {
      LinearForm left = expression();
      if (!is_comparator(tok_.kind)) lex_.fail("expected a comparison operator");
      while (is_comparator(tok_.kind)) {
        const Tok op = tok_.kind;
        advance();
        LinearForm right = expression();
        clause.all_of.push_back(make(left, op, right));
        left = std::move(right);
      }
      if (tok_.kind == Tok::end) return clause;
      if (tok_.kind != Tok::comma) lex_.fail("expected ',' between inequalities");
      advance();
    }
  }

 private:
  static bool is_comparator(Tok t) { return t == Tok::le || t == Tok::lt || t == Tok::ge || t == Tok::gt; }

  void advance() { tok_ = lex_.next(); }

  LinearForm expression() {
    LinearForm form;
    form.coefficient.assign(static_cast<std::size_t>(alphabet_max_) + 1, Rational(0));
    bool first = true;
    for (;;) {
      Rational sign = 1;
      if (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
        if (tok_.kind == Tok::minus) sign = -1;
        advance();
      } else if (!first) {
        return form;
      }
      first = false;
      Rational value = 1;
      bool have_number = false;
      if (tok_.kind == Tok::number) {
        value = tok_.number;
        have_number = true;
        advance();
        if (tok_.kind == Tok::star) {
          advance();
          if (tok_.kind != Tok::var) lex_.fail("expected p<k> after '*'");
        }
      }
      if (tok_.kind == Tok::var) {
        if (tok_.var > alphabet_max_) {
          lex_.fail("p" + std::to_string(tok_.var) + " beyond alphabet " + std::to_string(alphabet_max_));
        }
        form.coefficient[tok_.var] += sign * value;
        advance();
      } else if (have_number) {
        form.constant += sign * value;
      } else {
        lex_.fail("expected a term");
      }
    }
  }

  RationalInequality make(const LinearForm& left, Tok op, const LinearForm& right) const {
    // bring everything to  sum c_k p_k (<=|<) t, substituting p0 = 1 - sum p_k
    const bool flip = op == Tok::ge || op == Tok::gt;
    const LinearForm& lo = flip ? right : left;
    const LinearForm& hi = flip ? left : right;
    RationalInequality inequality;
    inequality.strict = op == Tok::lt || op == Tok::gt;
    inequality.threshold = hi.constant - lo.constant;
    const Rational c0 = lo.coefficient[0] - hi.coefficient[0];
    inequality.threshold -= c0;
    for (int k = 1; k <= alphabet_max_; ++k) {
      inequality.coefficients.push_back(lo.coefficient[k] - hi.coefficient[k] - c0);
    }
    return inequality;
  }

  Lexer lex_;
  int alphabet_max_;
  Token tok_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw SpecError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(s) + "'");
  }
}

std::string coefficient_text(const Rational& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  return to_string(c);
}

std::string inequality_text(const RationalInequality& inequality) {
  std::string text;
  for (std::size_t k = 1; k <= inequality.coefficients.size(); ++k) {
    Rational c = inequality.coefficients[k - 1];
    if (c.numerator() == 0) continue;
    if (text.empty()) {
      if (c < 0) text += "-";
    } else {
      text += c < 0 ? " - " : " + ";
    }
    if (c < 0) c = -c;
    if (c != Rational(1)) text += coefficient_text(c) + "*";
    text += "p" + std::to_string(k);
  }
  if (text.empty()) text = "0";
  text += inequality.strict ? " < " : " <= ";
  return text + coefficient_text(inequality.threshold);
}

}  // namespace

LevelSetSpec parse_level_set_spec(std::string_view text) {
  LevelSetSpec spec;
  bool have_alphabet = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto space = line.find_first_of(" \t");
    const std::string_view keyword = line.substr(0, space);
    const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));
    auto fail = [&](const std::string& message) -> SpecError {
      return SpecError("line " + std::to_string(line_no) + ": " + message);
    };

    if (keyword == "alphabet") {
      if (have_alphabet) throw fail("alphabet given twice");
      spec.alphabet_max = parse_int(rest, line_no, "alphabet bound");
      if (spec.alphabet_max < 1) throw fail("alphabet bound must be at least 1");
      have_alphabet = true;
    } else if (keyword == "support") {
      const auto dots = rest.find("..");
      if (dots == std::string_view::npos) throw fail("support expects lo..K");
      spec.min_value = parse_int(trim(rest.substr(0, dots)), line_no, "support start");
      const int hi = parse_int(trim(rest.substr(dots + 2)), line_no, "support end");
      if (!have_alphabet || hi != spec.alphabet_max) throw fail("support must end at the alphabet bound");
      if (spec.min_value < 0 || spec.min_value > hi) throw fail("support start outside the alphabet");
    } else if (keyword == "level") {
      if (!have_alphabet) throw fail("level before alphabet");
      if (rest.empty()) throw fail("level needs a label");
      spec.levels.push_back({std::string(rest), {}});
    } else if (keyword == "clause") {
      if (spec.levels.empty()) throw fail("clause outside a level");
      if (rest == "always") {
        spec.levels.back().any_of.push_back(Clause{});
      } else {
        spec.levels.back().any_of.push_back(ClauseParser(rest, line_no, spec.alphabet_max).parse());
      }
    } else {
      throw fail("unknown keyword '" + std::string(keyword) + "'");
    }
  }
  if (!have_alphabet) throw SpecError("missing alphabet line");
  if (spec.levels.empty()) throw SpecError("spec has no levels");
  return spec;
}

std::string to_text(const LevelSetSpec& spec) {
  std::ostringstream os;
  os << "alphabet " << spec.alphabet_max << '\n';
  if (spec.min_value != 0) os << "support " << spec.min_value << ".." << spec.alphabet_max << '\n';
  for (const auto& level : spec.levels) {
    os << "level " << level.label << '\n';
    for (const auto& clause : level.any_of) {
      os << "  clause ";
      if (clause.all_of.empty()) os << "always";
      for (std::size_t i = 0; i < clause.all_of.size(); ++i) {
        if (i) os << ", ";
        os << inequality_text(clause.all_of[i]);
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace anoncomp
