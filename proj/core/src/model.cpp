#include "relink/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace relink {

namespace {

constexpr char kMagic[4] = {'R', 'L', 'N', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
public:
    Reader(const std::filesystem::path& path, std::string data)
        : path_(path), data_(std::move(data)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(byte()); }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
        return v;
    }
    std::string bytes(std::size_t n) {
        if (pos_ + n > data_.size()) fail("truncated file");
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool exhausted() const { return pos_ == data_.size(); }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(path_.string() + ": " + what);
    }

private:
    unsigned char byte() {
        if (pos_ >= data_.size()) fail("truncated file");
        return static_cast<unsigned char>(data_[pos_++]);
    }
    const std::filesystem::path& path_;
    std::string data_;
    std::size_t pos_ = 0;
};

}  // namespace

NBModel::NBModel(TokenScheme scheme, std::vector<AuthorProfile> profiles)
    : scheme_(scheme), vocab_(vocab_size(scheme)) {
    if (profiles.empty()) throw std::invalid_argument("NBModel: at least one author required");
    std::sort(profiles.begin(), profiles.end(),
              [](const AuthorProfile& a, const AuthorProfile& b) { return a.author < b.author; });

    const std::size_t n = profiles.size();
    authors_.reserve(n);
    totals_.reserve(n);
    counts_.resize(n * vocab_);
    log_probs_.resize(n * vocab_);
    for (std::size_t i = 0; i < n; ++i) {
        AuthorProfile& p = profiles[i];
        if (i > 0 && p.author == authors_.back())
            throw std::invalid_argument("NBModel: duplicate author id '" + p.author + "'");
        if (p.author.empty()) throw std::invalid_argument("NBModel: empty author id");
        if (p.counts.scheme != scheme || p.counts.counts.size() != vocab_)
            throw std::invalid_argument("NBModel: profile scheme mismatch for '" + p.author + "'");
        const std::uint64_t total =
            std::accumulate(p.counts.counts.begin(), p.counts.counts.end(), std::uint64_t{0});
        if (total != p.counts.total)
            throw std::invalid_argument("NBModel: inconsistent totals for '" + p.author + "'");

        authors_.push_back(std::move(p.author));
        totals_.push_back(total);
        const double denom = static_cast<double>(total) + static_cast<double>(vocab_);
        for (std::size_t t = 0; t < vocab_; ++t) {
            const std::uint64_t c = p.counts.counts[t];
            counts_[i * vocab_ + t] = c;
            log_probs_[i * vocab_ + t] = std::log(static_cast<double>(c + 1) / denom);
        }
    }
}

std::size_t NBModel::author_index(std::string_view author) const {
    const auto it = std::lower_bound(authors_.begin(), authors_.end(), author);
    if (it == authors_.end() || *it != author)
        throw std::invalid_argument("NBModel: unknown author '" + std::string(author) + "'");
    return static_cast<std::size_t>(it - authors_.begin());
}

std::span<const std::uint64_t> NBModel::author_counts(std::size_t index) const {
    if (index >= authors_.size()) throw std::invalid_argument("NBModel: author index out of range");
    return {counts_.data() + index * vocab_, vocab_};
}

double NBModel::token_log_prob(std::size_t author_index, std::size_t token) const {
    if (author_index >= authors_.size())
        throw std::invalid_argument("NBModel: author index out of range");
    if (token >= vocab_) throw std::invalid_argument("NBModel: token out of range");
    return log_probs_[author_index * vocab_ + token];
}

double NBModel::token_log_prob(std::string_view author, std::size_t token) const {
    return token_log_prob(author_index(author), token);
}

void NBModel::score_into(const TokenCounts& tokens, std::vector<double>& out) const {
    if (tokens.scheme != scheme_)
        throw std::invalid_argument("NBModel: token scheme does not match model scheme");
    const std::size_t n = authors_.size();
    out.assign(n, 0.0);
    // Gather the nonzero tokens once; each author's sum then runs over them in
    // ascending token order, which pins the floating-point result.
    std::vector<std::pair<std::uint32_t, double>> nonzero;
    for (std::size_t t = 0; t < vocab_; ++t) {
        if (tokens.counts[t] != 0)
            nonzero.emplace_back(static_cast<std::uint32_t>(t),
                                 static_cast<double>(tokens.counts[t]));
    }
    if (nonzero.empty()) return;
    for (std::size_t i = 0; i < n; ++i) {
        const double* lp = log_probs_.data() + i * vocab_;
        double sum = 0.0;
        for (const auto& [t, c] : nonzero) sum += c * lp[t];
        out[i] = sum;
    }
}

std::vector<double> NBModel::score(const TokenCounts& tokens) const {
    std::vector<double> out;
    score_into(tokens, out);
    return out;
}

std::map<std::string, double> NBModel::score_map(const TokenCounts& tokens) const {
    const std::vector<double> s = score(tokens);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.emplace(authors_[i], s[i]);
    return out;
}

namespace {

Ranking ranking_from_scores(const std::vector<std::string>& authors,
                            const std::vector<double>& scores) {
    std::vector<std::size_t> order(authors.size());
    std::iota(order.begin(), order.end(), 0);
    // authors are pre-sorted ascending, so a stable sort on score alone
    // leaves ties in ascending-id order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Ranking ranking;
    ranking.entries.reserve(order.size());
    for (std::size_t i : order) ranking.entries.emplace_back(authors[i], scores[i]);
    return ranking;
}

}  // namespace

std::size_t rank_position(const std::vector<double>& scores, std::size_t index) {
    if (index >= scores.size())
        throw std::invalid_argument("rank_position: index out of range");
    const double own = scores[index];
    std::size_t pos = 1;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (scores[j] > own || (scores[j] == own && j < index)) ++pos;
    }
    return pos;
}

Ranking NBModel::rank(const TokenCounts& tokens) const {
    return ranking_from_scores(authors_, score(tokens));
}

std::size_t NBModel::rank_of(const TokenCounts& tokens, std::size_t author_index) const {
    if (author_index >= authors_.size())
        throw std::invalid_argument("NBModel: author index out of range");
    return rank_position(score(tokens), author_index);
}

NBModel build_model(std::span<const std::pair<std::string, std::span<const Tweet>>> slices,
                    TokenScheme scheme) {
    if (slices.empty()) throw std::invalid_argument("build_model: at least one author required");
    std::vector<AuthorProfile> profiles;
    profiles.reserve(slices.size());
    for (const auto& [author, tweets] : slices)
        profiles.push_back(AuthorProfile{author, count(tweets, scheme)});
    return NBModel(scheme, std::move(profiles));
}

NBModel build_model(const AuthorCorpus& corpus, TokenScheme scheme) {
    std::vector<std::pair<std::string, std::span<const Tweet>>> slices;
    slices.reserve(corpus.author_count());
    for (const auto& [author, tweets] : corpus.authors) slices.emplace_back(author, tweets);
    return build_model(slices, scheme);
}

Ranking rank_combined(const NBModel& text_model, const NBModel& hashtag_model,
                      const TokenCounts& text_tokens, const TokenCounts& hashtag_tokens,
                      double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))  // also rejects NaN
        throw std::invalid_argument("rank_combined: beta must lie in [0, 1]");
    if (text_model.scheme() != TokenScheme::TextUnigram ||
        hashtag_model.scheme() != TokenScheme::HashtagUnigram)
        throw std::invalid_argument("rank_combined: expected a text-unigram and a hashtag model");
    if (text_model.authors() != hashtag_model.authors())
        throw std::invalid_argument("rank_combined: models cover different author sets");

    const std::vector<double> text_scores = text_model.score(text_tokens);
    const std::vector<double> hashtag_scores = hashtag_model.score(hashtag_tokens);
    std::vector<double> combined(text_scores.size());
    for (std::size_t i = 0; i < combined.size(); ++i)
        combined[i] = beta * text_scores[i] + (1.0 - beta) * hashtag_scores[i];
    return ranking_from_scores(text_model.authors(), combined);
}

void NBModel::save(const std::filesystem::path& path) const {
    std::string out;
    out.append(kMagic, sizeof(kMagic));
    put_u32(out, kFormatVersion);
    out.push_back(static_cast<char>(scheme_));
    put_u32(out, static_cast<std::uint32_t>(vocab_));
    put_u64(out, authors_.size());
    for (std::size_t i = 0; i < authors_.size(); ++i) {
        put_u32(out, static_cast<std::uint32_t>(authors_[i].size()));
        out.append(authors_[i]);
        put_u64(out, totals_[i]);
        for (std::size_t t = 0; t < vocab_; ++t) put_u64(out, counts_[i * vocab_ + t]);
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error(path.string() + ": cannot open for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error(path.string() + ": write failed");
}

NBModel NBModel::load(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ParseError(path.string() + ": cannot open file");
    std::string data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    Reader in(path, std::move(data));

    if (in.bytes(4) != std::string(kMagic, sizeof(kMagic))) in.fail("not a model file (bad magic)");
    if (const std::uint32_t version = in.u32(); version != kFormatVersion)
        in.fail("unsupported model format version " + std::to_string(version));
    const std::uint8_t scheme_byte = in.u8();
    if (scheme_byte > 2) in.fail("unknown token scheme");
    const auto scheme = static_cast<TokenScheme>(scheme_byte);
    const std::uint32_t vocab = in.u32();
    if (vocab != vocab_size(scheme)) in.fail("vocabulary size does not match scheme");
    const std::uint64_t n_authors = in.u64();
    if (n_authors == 0) in.fail("model has no authors");

    std::vector<AuthorProfile> profiles;
    profiles.reserve(n_authors);
    for (std::uint64_t i = 0; i < n_authors; ++i) {
        const std::uint32_t id_len = in.u32();
        AuthorProfile p;
        p.author = in.bytes(id_len);
        p.counts = TokenCounts(scheme);
        const std::uint64_t total = in.u64();
        for (std::uint32_t t = 0; t < vocab; ++t) {
            const std::uint64_t c = in.u64();
            p.counts.counts[t] = c;
            p.counts.total += c;
        }
        if (p.counts.total != total) in.fail("corrupt counts for author '" + p.author + "'");
        profiles.push_back(std::move(p));
    }
    if (!in.exhausted()) in.fail("trailing bytes after model data");
    return NBModel(scheme, std::move(profiles));
}

}  // namespace relink
