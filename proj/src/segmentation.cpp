#include "spandrop/segmentation.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace spandrop::seg {

void Strategy::validate() const {
    if (kind == Kind::fixed && fixed_k < 1)
        throw std::invalid_argument("fixed span size must be >= 1");
    if (kind == Kind::adaptive && ngram_order < 2)
        throw std::invalid_argument("adaptive n-gram order must be >= 2");
    if (kind == Kind::delimiter && enders.empty())
        throw std::invalid_argument("delimiter strategy needs at least one ender token");
}

Strategy parse_strategy(std::string_view text) {
    Strategy s;
    const auto eq = text.find('=');
    const std::string_view name = text.substr(0, eq);
    const std::string_view arg = eq == std::string_view::npos ? std::string_view{} : text.substr(eq + 1);

    const auto parse_count = [&](std::string_view v) -> std::size_t {
        try {
            std::size_t pos = 0;
            const unsigned long long n = std::stoull(std::string(v), &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return static_cast<std::size_t>(n);
        } catch (...) {
            throw std::invalid_argument("bad strategy argument: " + std::string(text));
        }
    };

    if (name == "token") {
        s.kind = Strategy::Kind::per_token;
    } else if (name == "fixed") {
        s.kind = Strategy::Kind::fixed;
        s.fixed_k = parse_count(arg);
    } else if (name == "sentence") {
        s.kind = Strategy::Kind::delimiter;
        std::size_t start = 0;
        while (start <= arg.size()) {
            const auto comma = arg.find(',', start);
            const auto end = comma == std::string_view::npos ? arg.size() : comma;
            if (end > start) s.enders.emplace_back(arg.substr(start, end - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    } else if (name == "adaptive") {
        s.kind = Strategy::Kind::adaptive;
        s.ngram_order = arg.empty() ? 2 : parse_count(arg);
    } else {
        throw std::invalid_argument("unknown strategy: " + std::string(text));
    }
    s.validate();
    return s;
}

std::vector<Span> segment_fixed(const TokenList& tokens, std::size_t k) {
    if (k < 1) throw std::invalid_argument("fixed span size must be >= 1");
    std::vector<Span> spans;
    spans.reserve(tokens.size() / k + 1);
    for (std::size_t start = 0; start < tokens.size(); start += k) {
        const std::size_t end = std::min(start + k, tokens.size());
        spans.push_back(Span{spans.size(), TokenList(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                                     tokens.begin() + static_cast<std::ptrdiff_t>(end))});
    }
    return spans;
}

std::vector<Span> segment_delimiter(const TokenList& tokens, const std::vector<std::string>& enders) {
    const std::unordered_set<std::string> ender_set(enders.begin(), enders.end());
    std::vector<Span> spans;
    TokenList current;
    for (const auto& tok : tokens) {
        current.push_back(tok);
        if (ender_set.count(tok)) {
            spans.push_back(Span{spans.size(), std::move(current)});
            current.clear();
        }
    }
    if (!current.empty()) spans.push_back(Span{spans.size(), std::move(current)});
    return spans;
}

namespace {

std::string fold(std::string_view tok) {
    std::string out(tok);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Tokens joined with an unlikely separator; good enough as an n-gram key.
std::string ngram_key(const TokenList& tokens, std::size_t start, std::size_t order, bool fold_case) {
    std::string key;
    for (std::size_t i = 0; i < order; ++i) {
        if (i > 0) key += '\x1f';
        key += fold_case ? fold(tokens[start + i]) : tokens[start + i];
    }
    return key;
}

}  // namespace

std::vector<std::uint8_t> mark_ngram_overlap(const TokenList& context, const TokenList& reference,
                                             std::size_t order, bool fold_case) {
    if (order < 2) throw std::invalid_argument("n-gram order must be >= 2");
    std::vector<std::uint8_t> marks(context.size(), 0);
    if (context.size() < order || reference.size() < order) return marks;

    std::unordered_set<std::string> reference_grams;
    for (std::size_t i = 0; i + order <= reference.size(); ++i)
        reference_grams.insert(ngram_key(reference, i, order, fold_case));

    for (std::size_t i = 0; i + order <= context.size(); ++i) {
        if (reference_grams.count(ngram_key(context, i, order, fold_case)))
            for (std::size_t j = i; j < i + order; ++j) marks[j] = 1;
    }
    return marks;
}

AdaptiveResult segment_adaptive(const TokenList& context, const TokenList& reference,
                                std::size_t order, bool fold_case) {
    const auto marks = mark_ngram_overlap(context, reference, order, fold_case);
    AdaptiveResult result;
    std::size_t i = 0;
    while (i < context.size()) {
        if (marks[i]) {
            std::size_t end = i;
            while (end < context.size() && marks[end]) ++end;
            result.supporting.push_back(result.spans.size());
            result.spans.push_back(
                Span{result.spans.size(), TokenList(context.begin() + static_cast<std::ptrdiff_t>(i),
                                                    context.begin() + static_cast<std::ptrdiff_t>(end))});
            i = end;
        } else {
            result.spans.push_back(Span{result.spans.size(), {context[i]}});
            ++i;
        }
    }
    return result;
}

AdaptiveResult segment(const TokenList& tokens, const Strategy& strategy, const TokenList* reference) {
    strategy.validate();
    AdaptiveResult result;
    switch (strategy.kind) {
        case Strategy::Kind::per_token:
            result.spans = segment_fixed(tokens, 1);
            break;
        case Strategy::Kind::fixed:
            result.spans = segment_fixed(tokens, strategy.fixed_k);
            break;
        case Strategy::Kind::delimiter:
            result.spans = segment_delimiter(tokens, strategy.enders);
            break;
        case Strategy::Kind::adaptive:
            if (reference == nullptr)
                throw std::invalid_argument("adaptive segmentation needs a reference token list");
            result = segment_adaptive(tokens, *reference, strategy.ngram_order, strategy.fold_case);
            break;
    }
    return result;
}

}  // namespace spandrop::seg
