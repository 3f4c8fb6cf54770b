#pragma once

#include <string>

namespace tarag::prompts {

// Prompt templates also ship as text files under prompts/; keep both in sync.
// The version string participates in annotation cache keys.
inline constexpr const char* kVersion = "v1";

inline constexpr const char* kDocPassOne = R"(You are annotating a document for a temporal search index.
Below are the beginning and the end of the document. Estimate the document's
publication date and write a one- or two-sentence abstract.

Reply with strict JSON only, no prose, matching this schema:
{"pub_time": "YYYY-MM-DD", "abstract": "..."}

Document beginning:
{head}

Document ending:
{tail}
)";

inline constexpr const char* kChunkPassTwo = R"(You are annotating one chunk of a document for a temporal search index.
The document was published around {pub_time}. Document abstract: {abstract}

List the time intervals of the events described in the chunk. Use half-open
calendar intervals: the end date is the first day AFTER the event period.
Resolve abbreviated mentions (bare months, weekdays, "last quarter") relative
to the publication date.

Reply with strict JSON only, matching this schema:
{"intervals": [{"start": "YYYY-MM-DD", "end": "YYYY-MM-DD"}]}

Chunk:
{chunk}
)";

inline constexpr const char* kDecomposeQuestion = R"(Decompose the question below into a temporally neutral core query and a list
of temporal constraints. The core query must contain no dates, years, month
names, or other temporal expressions.

Reply with strict JSON only, matching this schema:
{"q_core": "...",
 "constraints": [
   {"kind": "bounded", "start": "YYYY-MM-DD", "end": "YYYY-MM-DD"} |
   {"kind": "before", "date": "YYYY-MM-DD"} |
   {"kind": "after", "date": "YYYY-MM-DD"} |
   {"kind": "unconstrained"}
 ]}

Intervals are half-open; "before" excludes the named period, "after" starts
the day the named period ends.

Question:
{question}
)";

inline constexpr const char* kRepairSuffix = R"(

Your previous reply could not be parsed as JSON matching the schema. Reply
again with strict JSON only and nothing else.)";

// The generator double OverlapOracleLlm depends on the "Question:"/"Choices:"
// markers and the "A."-style choice lines of this template.
inline constexpr const char* kGenerateAnswer = R"(Answer the multiple-choice question using only the context below. The context
lists evidence passages in chronological order, each tagged with its
publication date.

Context:
{context}

Question: {question}
Choices:
A. {choice_a}
B. {choice_b}
C. {choice_c}
D. {choice_d}

Reply with the single letter of the correct choice.
)";

std::string fill(std::string tmpl, const std::string& key, const std::string& value);

}  // namespace tarag::prompts
