#include "relink/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "relink/tokenize.hpp"
#include "rng_util.hpp"

namespace relink {

namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

void chomp_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string apply_strips(std::string text, const LoadOptions& opts) {
    // Replacing with a space keeps the surrounding tokens separated.
    static const std::regex url_re(R"((https?://\S+|www\.\S+))", std::regex::optimize);
    static const std::regex mention_re(R"(@[A-Za-z0-9_]+)", std::regex::optimize);
    if (opts.strip_urls) text = std::regex_replace(text, url_re, " ");
    if (opts.strip_mentions) text = std::regex_replace(text, mention_re, " ");
    return text;
}

bool keep_tweet(std::string_view text, const LoadOptions& opts) {
    return !(opts.strip_retweets && text.starts_with("RT @"));
}

void add_tweet(AuthorCorpus& corpus, std::string author, std::string text,
               std::optional<std::string> ts, const LoadOptions& opts) {
    if (!keep_tweet(text, opts)) return;
    if (opts.strip_urls || opts.strip_mentions) text = apply_strips(std::move(text), opts);
    auto& list = corpus.authors[author];
    list.push_back(Tweet{std::move(author), std::move(text), std::move(ts)});
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    return in;
}

}  // namespace

std::size_t AuthorCorpus::tweet_count() const {
    std::size_t n = 0;
    for (const auto& [id, tweets] : authors) n += tweets.size();
    return n;
}

void load_jsonl_into(AuthorCorpus& corpus, const std::filesystem::path& path,
                     const LoadOptions& opts) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp_cr(line);
        if (is_blank(line)) continue;

        const nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw ParseError(location(path, line_no) + ": malformed JSON record");
        const auto user_it = record.find("user");
        if (user_it == record.end() || !user_it->is_string() ||
            user_it->get_ref<const std::string&>().empty())
            throw ParseError(location(path, line_no) + ": missing or empty 'user' field");
        const auto text_it = record.find("text");
        if (text_it == record.end() || !text_it->is_string())
            throw ParseError(location(path, line_no) + ": missing 'text' field");

        std::optional<std::string> ts;
        if (const auto ts_it = record.find("ts"); ts_it != record.end()) {
            if (!ts_it->is_string())
                throw ParseError(location(path, line_no) + ": 'ts' must be a string");
            ts = ts_it->get<std::string>();
        }
        add_tweet(corpus, user_it->get<std::string>(), text_it->get<std::string>(),
                  std::move(ts), opts);
    }
}

AuthorCorpus load_jsonl(const std::filesystem::path& path, const LoadOptions& opts) {
    AuthorCorpus corpus;
    load_jsonl_into(corpus, path, opts);
    return corpus;
}

void load_snap_blocks_into(AuthorCorpus& corpus, const std::filesystem::path& path,
                           const LoadOptions& opts) {
    std::ifstream in = open_or_throw(path);

    std::optional<std::string> ts, url, text;
    std::size_t block_no = 0;
    bool in_block = false;

    auto block_error = [&](const std::string& what) {
        return ParseError(path.string() + ": block " + std::to_string(block_no) + ": " + what);
    };
    auto flush = [&] {
        if (!in_block) return;
        if (!ts) throw block_error("missing 'T' line");
        if (!url) throw block_error("missing 'U' line");
        if (!text) throw block_error("missing 'W' line");
        const std::size_t slash = url->find_last_of('/');
        std::string user = slash == std::string::npos ? *url : url->substr(slash + 1);
        if (user.empty()) throw block_error("'U' line has no user segment");
        add_tweet(corpus, std::move(user), std::move(*text), std::move(ts), opts);
        ts.reset();
        url.reset();
        text.reset();
        in_block = false;
    };

    std::string line;
    while (std::getline(in, line)) {
        chomp_cr(line);
        if (is_blank(line)) {
            flush();
            continue;
        }
        if (!in_block) {
            in_block = true;
            ++block_no;
        }
        const char tag = line[0];
        if (line.size() < 2 || (line[1] != '\t' && line[1] != ' '))
            throw block_error("expected 'T', 'U' or 'W' line, got: " + line.substr(0, 20));
        const std::size_t value_at = line.find_first_not_of(" \t", 1);
        std::string value = value_at == std::string::npos ? std::string() : line.substr(value_at);
        switch (tag) {
            case 'T':
                if (ts) throw block_error("duplicate 'T' line");
                ts = std::move(value);
                break;
            case 'U':
                if (url) throw block_error("duplicate 'U' line");
                url = std::move(value);
                break;
            case 'W':
                if (text) throw block_error("duplicate 'W' line");
                text = std::move(value);
                break;
            default:
                throw block_error("expected 'T', 'U' or 'W' line, got: " + line.substr(0, 20));
        }
    }
    flush();
}

AuthorCorpus load_snap_blocks(const std::filesystem::path& path, const LoadOptions& opts) {
    AuthorCorpus corpus;
    load_snap_blocks_into(corpus, path, opts);
    return corpus;
}

CorpusStats corpus_stats(const AuthorCorpus& corpus, const std::vector<std::uint64_t>& thresholds) {
    CorpusStats stats;
    stats.total_authors = corpus.author_count();
    for (std::uint64_t t : thresholds) stats.fraction_at_least[t] = 0.0;
    if (stats.total_authors == 0) return stats;

    stats.min_tweets_per_author = std::numeric_limits<std::uint64_t>::max();
    for (const auto& [id, tweets] : corpus.authors) {
        const std::uint64_t n = tweets.size();
        stats.total_tweets += n;
        stats.max_tweets_per_author = std::max(stats.max_tweets_per_author, n);
        stats.min_tweets_per_author = std::min(stats.min_tweets_per_author, n);
        for (std::uint64_t t : thresholds)
            if (n >= t) stats.fraction_at_least[t] += 1.0;
    }
    for (auto& [t, count] : stats.fraction_at_least)
        count /= static_cast<double>(stats.total_authors);
    return stats;
}

std::string CorpusStats::to_csv() const {
    std::ostringstream out;
    out << "metric,value\n";
    out << "total_tweets," << total_tweets << "\n";
    out << "total_authors," << total_authors << "\n";
    out << "max_tweets_per_author," << max_tweets_per_author << "\n";
    out << "min_tweets_per_author," << min_tweets_per_author << "\n";
    char buf[32];
    for (const auto& [t, fraction] : fraction_at_least) {
        std::snprintf(buf, sizeof(buf), "%.6f", fraction);
        out << "fraction_at_least_" << t << "," << buf << "\n";
    }
    return out.str();
}

AuthorCorpus filter_by_prolificacy(const AuthorCorpus& corpus, std::size_t min_tweets,
                                   std::optional<std::size_t> max_tweets) {
    if (min_tweets < 1) throw std::invalid_argument("filter_by_prolificacy: min_tweets must be >= 1");
    if (max_tweets && *max_tweets < min_tweets)
        throw std::invalid_argument("filter_by_prolificacy: max_tweets must be >= min_tweets");
    AuthorCorpus out;
    for (const auto& [id, tweets] : corpus.authors) {
        const std::size_t n = tweets.size();
        if (n >= min_tweets && (!max_tweets || n <= *max_tweets)) out.authors.emplace(id, tweets);
    }
    return out;
}

AuthorCorpus sample_authors(const AuthorCorpus& corpus, std::size_t n, std::uint64_t seed) {
    if (n > corpus.author_count())
        throw std::invalid_argument("sample_authors: requested " + std::to_string(n) +
                                    " authors from a population of " +
                                    std::to_string(corpus.author_count()));
    std::vector<std::string_view> ids;
    ids.reserve(corpus.author_count());
    for (const auto& [id, tweets] : corpus.authors) ids.push_back(id);  // map order: ascending

    std::mt19937_64 rng(seed);
    detail::fisher_yates(ids, rng);

    AuthorCorpus out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = corpus.authors.find(ids[i]);
        out.authors.emplace(it->first, it->second);
    }
    return out;
}

AuthorCorpus filter_hashtag_bearing(const AuthorCorpus& corpus, std::size_t min_tweets) {
    if (min_tweets < 1) throw std::invalid_argument("filter_hashtag_bearing: min_tweets must be >= 1");
    AuthorCorpus out;
    for (const auto& [id, tweets] : corpus.authors) {
        std::vector<Tweet> kept;
        for (const Tweet& tweet : tweets)
            if (has_hashtag(tweet.text)) kept.push_back(tweet);
        if (kept.size() >= min_tweets) out.authors.emplace(id, std::move(kept));
    }
    return out;
}

}  // namespace relink
