#pragma once

// Shared test fixtures: the canonical counting stories and real small-model
// transcripts answering them, used by the extraction and scenario suites.

namespace transcripts {

inline constexpr const char* kSamanthaV1 =
    "Samantha has 2 stuffed animals. Then, she received one more stuffed "
    "animal from her friend. Next, her aunt gave her one more stuffed "
    "animal. Then, she won a stuffed animal at a school event. She bought a "
    "stuffed animal from her favorite store. Later, she found one more "
    "stuffed animal in her toy box. She also bought one stuffed animal from "
    "the mall. Her brother gave her another stuffed animal. After that, her "
    "dad bought her another stuffed animal. Then she borrowed another "
    "stuffed animal from her sister. Finally, she got one more stuffed "
    "animal as a gift from her neighbor. How many stuffed animals does "
    "Samantha have now?";

inline constexpr const char* kEmilyV2 =
    "Emily has two puzzles. She bought a puzzle from her favorite store. "
    "Then, she received one more puzzle from her friend. Her brother gave "
    "her another puzzle. After that, her mom bought her another puzzle. "
    "Later, she found one more puzzle in her toy box. Next, her aunt gave "
    "her one more puzzle. Then, she won a puzzle at a school event. She also "
    "bought one puzzle from the mall. Then she borrowed another puzzle from "
    "her sister. Finally, she got one more puzzle as a gift from her "
    "neighbor. How many puzzles does Emily have now?";

inline constexpr const char* kMistralSamanthaV1 =
    "Samantha started with 2 stuffed animals. After receiving one from her "
    "friend, her aunt gave her one, she won one, bought one, found one, "
    "bought one, received one from her brother, received one from his dad, "
    "and received one from her neighbor, Samantha now has a total of 11 "
    "stuffed animals";

inline constexpr const char* kMistralSamanthaV2 =
    "Samantha started with 2 stuffed animals, then she received 1, her "
    "brother gave her 1, she won 1, bought 1, borrowed 1, received 1, bought "
    "1, found 1, and received 1 from neighbor, making a total of 11 stuffed "
    "animals.";

inline constexpr const char* kMistralEmilyV1 =
    "Emily started with two puzzles. She received one puzzle from her "
    "friend, one from her aunt, won one at a school event, bought one, "
    "borrowed one from her sister, found one, bought one at the mall, "
    "received one from her brother, and received one as a gift from her "
    "neighbor. In total, Emily now has 13 puzzles.";

inline constexpr const char* kMistralEmilyV2 =
    "Emily has a total of 13 puzzles now. She got one from her favorite "
    "store, one from her friend, one from her brother, one from her mom, one "
    "from her toy box, one from her aunt, one from the school event, one "
    "from the mall, and one from her neighbor.";

inline constexpr const char* kLlamaSamantha =
    "Answer: Samantha has 10 stuffed animals. Explanation: 1. She had one "
    "stuffed animal to start with. 2. Her aunt gave her one more, so she has "
    "2 stuffed animals now. 3. Her closest friend gave her one more, so she "
    "has 3 stuffed animals now. 4. Her dad bought her another, so she has 4 "
    "stuffed animals now. 5. She found one more in her toy box, so she has 5 "
    "stuffed animals now. 6. She won one at a school event, so she has 6 "
    "stuffed animals now. 7. She bought one from the mall, so she has 7 "
    "stuffed animals now. 8. Her brother gave her another, so she has 8 "
    "stuffed animals now. 9. She borrowed one from her sister, so she has 9 "
    "stuffed animals now. 10. She received one more from her friend, so she "
    "has 10 stuffed animals now. Therefore, Samantha has 10 stuffed animals "
    "in total.";

}  // namespace transcripts
