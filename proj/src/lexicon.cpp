#include "mtforge/lexicon.hpp"

namespace mtforge {

namespace {

constexpr std::string_view kWords[] = {
    "the", "of", "and", "to", "in", "is", "was", "for", "on", "that", "with", "as", "by", "at",
    "from", "his", "her", "it", "an", "are", "were", "be", "this", "which", "or", "he", "she",
    "they", "we", "you", "not", "but", "have", "has", "had", "one", "two", "three", "all",
    "new", "first", "more", "after", "also", "other", "time", "year", "years", "people", "city",
    "world", "day", "night", "water", "house", "river", "road", "school", "book", "music",
    "film", "game", "team", "war", "king", "queen", "home", "land", "life", "work", "place",
    "name", "part", "state", "small", "large", "great", "long", "old", "young", "high", "low",
    "good", "bad", "open", "close", "find", "give", "take", "make", "know", "think", "see",
    "look", "come", "go", "run", "walk", "talk", "read", "write", "sing", "play", "live",
    "move", "stand", "sit", "hold", "bring", "begin", "keep", "leave", "turn", "show", "hear",
    "feel", "eat", "drink", "sleep", "cat", "dog", "bird", "fish", "horse", "tree", "flower",
    "sun", "moon", "star", "sky", "rain", "snow", "wind", "fire", "stone", "sea", "lake",
    "hill", "field", "forest", "garden", "street", "town", "village", "country", "family",
    "mother", "father", "child", "friend", "man", "woman", "boy", "girl", "teacher", "doctor",
    "student", "word", "story", "song", "letter", "door", "window", "table", "chair", "bed",
    "room", "wall", "floor", "paper", "color", "red", "blue", "green", "white", "black",
    "yellow", "warm", "cold", "light", "dark", "fast", "slow", "early", "late", "near", "far",
    "left", "right", "under", "over", "before", "between", "again", "always", "never", "often",
    "today", "tomorrow", "morning", "evening", "week", "month", "summer", "winter", "spring",
    "autumn", "bread", "milk", "tea", "coffee", "apple", "market", "money", "price", "voice",
    "heart", "hand", "head", "eye", "face", "body", "sound",
};

}  // namespace

std::span<const std::string_view> core_lexicon() { return kWords; }

}  // namespace mtforge
