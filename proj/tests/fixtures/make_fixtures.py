#!/usr/bin/env python3
"""Regenerates the worked-example corpus fixtures.

Tokens use the byte-level fallback encoding (byte value + 4), matching
docpack::tokenize_fallback.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent
OFFSET = 4


def tok(text):
    return [b + OFFSET for b in text.encode("utf-8")]


FEAR_REAPER = (
    '"A Dark Knight: The Fear Reaper" is the second episode of the fourth season and 68th '
    'episode overall from the Fox series "Gotham". The show is itself based on the characters '
    'created by DC Comics set in the Batman mythology. The episode was written by executive '
    'producer Danny Cannon and directed by Louis Shaw Milito. It was first broadcast on '
    'September 28, 2017.'
)
GOTHAM_S4 = (
    'The fourth season of the American television series "Gotham", based on characters from '
    'DC Comics related to the Batman franchise, revolves around the characters of James Gordon '
    'and Bruce Wayne. The season is produced by Primrose Hill Productions, DC Entertainment, and '
    'Warner Bros. Television, with Bruno Heller, Danny Cannon, and John Stephens serving as '
    'executive producers. The first half of the season will be inspired by the comic book story '
    '", and the second half by ". The subtitle for the first half of the season is "A Dark Knight".'
)
GOTHAM_TV = (
    'Gotham is an American crime drama television series developed by Bruno Heller, based on '
    'characters published by DC Comics and appearing in the Batman franchise, primarily those of '
    'James Gordon and Bruce Wayne. The series stars Ben McKenzie as the young Gordon, while Heller '
    'executive-produces, along with Danny Cannon, who also directed the pilot.'
)

HOTPOT_DOCS = [
    ("hp-fear-reaper", "A Dark Knight: The Fear Reaper", FEAR_REAPER),
    ("hp-gotham-s4", "Gotham (season 4)", GOTHAM_S4),
    ("hp-gotham-tv", "Gotham (TV series)", GOTHAM_TV),
    ("hp-dc-comics", "DC Comics",
     "DC Comics, Inc. is an American comic book publisher and the flagship unit of DC "
     "Entertainment."),
    ("hp-batman", "Batman",
     "Batman is a superhero appearing in American comic books published by DC Comics."),
    ("hp-danny-cannon", "Danny Cannon",
     "Danny Cannon is an English film and television director, producer and writer."),
    ("hp-bruno-heller", "Bruno Heller",
     "Bruno Heller is a British screenwriter and television producer."),
    ("hp-fox", "Fox Broadcasting Company",
     "The Fox Broadcasting Company is an American commercial broadcast television network."),
    ("hp-pax-romana", "Pax Romana (Gotham)",
     "\"Pax Romana\" is the eighth episode of the fourth season of the series \"Gotham\"."),
    ("hp-gotham-s3", "Gotham (season 3)",
     "The third season of the American television series \"Gotham\" premiered on Fox."),
]
HOTPOT_GROUP = {
    "question_id": "hotpot-fear-reaper",
    "question": '"A Dark Knight: The Fear Reaper" is the second episode of the fourth season, of '
                'the American television series "Gotham", based on characters, from which company?',
    "doc_ids": [d[0] for d in HOTPOT_DOCS],
    "relevant_ids": ["hp-fear-reaper", "hp-gotham-s4"],
    "answer": "DC Comics",
}
HOTPOT_MODEL = (
    "# Evidence:\n"
    "## A Dark Knight: The Fear Reaper\n"
    + FEAR_REAPER.replace("fourth season and 68th", "fourth season, and 67th")
    + "\n\n## Gotham (TV series)\n" + GOTHAM_TV
    + "\n\n# Answer:\nDC Comics\n"
)

DALLAS = ("Dallas 362 is a 2003 film, starring and directed by Scott Caan. This film was Caan's "
          "debut as a director. The movie won the Critics Award at the 2003 CineVegas "
          "International Film Festival in Las Vegas, Nevada.")
BARBARIANS = ("Revenge of the Barbarians is a 1960 film about the sack of Rome in AD 410 by the "
              "Visigoths. This film was written by Gastone Ramazzotti and directed by Giuseppe Vari.")
CAAN = ('Scott Andrew Caan (born August 23, 1976) is an American actor. He stars as Detective '
        'Sergeant Danny "Danno" Williams in the CBS television series "Hawaii Five-0" (2010 – '
        'present), for which he was nominated for a Golden Globe Award. Caan had a recurring role as '
        'manager Scott Lavin in the HBO television series "Entourage" (2009 – 2011). In the '
        '1990s, he was a part of hip hop group The Whooliganz with The Alchemist. The duo went by '
        'the names Mad Skillz and Mudfoot, respectively.')
CAAN_MODEL = ('Scott Andrew Caan (born August 23, 1966) is an American actor, producer, director, '
              'and screenwriter. He first achieved notability for starring in the 1988 zombie '
              'horror film "Return of the Living Dead Part II", and for his role as Sean Mitchell in '
              'the 1990s ABC/ CBS series "The New Adventures of Little House on the Prairie". He is '
              'also known for his roles in the films "Cobra Kai" (2018–2019) and "The Karate '
              'Kid" (1995).')
VARI = ("Giuseppe Vari (9 March 1924 – 1 October 1993) was an Italian film director, editor "
        "and screenwriter.")

WIKI_DOCS = [
    ("wk-dallas-362", "Dallas 362", DALLAS),
    ("wk-barbarians", "Revenge of the Barbarians", BARBARIANS),
    ("wk-scott-caan", "Scott Caan", CAAN),
    ("wk-giuseppe-vari", "Giuseppe Vari", VARI),
    ("wk-james-caan", "James Caan", "James Edmund Caan was an American actor."),
    ("wk-cinevegas", "CineVegas", "CineVegas was a film festival held annually in Las Vegas."),
]
WIKI_GROUP = {
    "question_id": "2wiki-dallas-362",
    "question": "Which film whose director is younger, Dallas 362 or Revenge Of The Barbarians?",
    "doc_ids": [d[0] for d in WIKI_DOCS],
    "relevant_ids": ["wk-dallas-362", "wk-barbarians", "wk-scott-caan", "wk-giuseppe-vari"],
    "answer": "Dallas 362",
}
WIKI_MODEL = (
    "# Evidence:\n"
    "## Dallas 362\n" + DALLAS + "\n\n"
    "## Revenge of the Barbarians\n" + BARBARIANS + "\n\n"
    "## Scott Caan\n" + CAAN_MODEL + "\n\n"
    "## Giuseppe Vari\n" + VARI + "\n\n"
    "# Answer:\nDallas 362\n"
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def docs(entries):
    return [{"id": i, "title": t, "tokens": tok(x), "text": x} for i, t, x in entries]


write_jsonl(HERE / "hotpot_docs.jsonl", docs(HOTPOT_DOCS))
write_jsonl(HERE / "hotpot_groups.jsonl", [HOTPOT_GROUP])
write_jsonl(HERE / "worked_docs.jsonl", docs(HOTPOT_DOCS + WIKI_DOCS))
write_jsonl(HERE / "worked_groups.jsonl", [HOTPOT_GROUP, WIKI_GROUP])
write_jsonl(HERE / "hotpot_generations.jsonl",
            [{"question_id": HOTPOT_GROUP["question_id"], "text": HOTPOT_MODEL}])
write_jsonl(HERE / "worked_generations.jsonl",
            [{"question_id": HOTPOT_GROUP["question_id"], "text": HOTPOT_MODEL},
             {"question_id": WIKI_GROUP["question_id"], "text": WIKI_MODEL}])
(HERE / "hotpot_model_answer.md").write_text(HOTPOT_MODEL, encoding="utf-8")

# Golden renderings, spelled out literally rather than through the library.
JUDGE_GOLDEN = (
    "Your task is to compare the model's answer to the expected answer and determine if the "
    "model's answer is correct. Respond with \"yes\" if the answer is correct, and \"no\" if it "
    "is incorrect. Do not include any explanations.\n"
    "\n"
    "Question: Which film whose director is younger, Dallas 362 or Revenge Of The Barbarians?\n"
    "Expected Answer: Dallas 362\n"
    "Model's Answer: Dallas 362"
)
(HERE / "judge_prompt_golden.txt").write_bytes(JUDGE_GOLDEN.encode("utf-8"))

SFT_PROMPT = (
    "Below is a question. Your task is to read the question, recall the necessary information, "
    "and provide a concise answer. Please ensure your answer is based only on the recalled "
    "information.\n\n# Question:\n" + HOTPOT_GROUP["question"] + "\n"
)
SFT_TARGET = (
    "# Evidence:\n"
    "## A Dark Knight: The Fear Reaper\n" + FEAR_REAPER + "\n\n"
    "## Gotham (season 4)\n" + GOTHAM_S4 + "\n\n"
    "# Answer:\nDC Comics\n"
)
(HERE / "sft_prompt_golden.txt").write_bytes(SFT_PROMPT.encode("utf-8"))
(HERE / "sft_target_golden.txt").write_bytes(SFT_TARGET.encode("utf-8"))

broken = HERE / "broken"
broken.mkdir(exist_ok=True)
write_jsonl(broken / "docs_ok.jsonl", [
    {"id": "a", "title": "A", "tokens": [10, 11, 12]},
    {"id": "b", "title": "B", "tokens": [13, 14]},
])
write_jsonl(broken / "groups_dangling.jsonl", [
    {"question_id": "q1", "doc_ids": ["a", "ghost-doc"], "relevant_ids": ["a"], "answer": "x"},
])
write_jsonl(broken / "docs_duplicate.jsonl", [
    {"id": "a", "title": "A", "tokens": [10]},
    {"id": "a", "title": "A again", "tokens": [11]},
])
write_jsonl(broken / "docs_reserved.jsonl", [
    {"id": "a", "title": "A", "tokens": [10, 1, 12]},
])
write_jsonl(broken / "groups_ok.jsonl", [
    {"question_id": "q1", "doc_ids": ["a", "b"], "relevant_ids": ["a"], "answer": "x"},
])
(broken / "docs_malformed.jsonl").write_text(
    '{"id": "a", "title": "A", "tokens": [10]}\n{"id": "b", "title": \n', encoding="utf-8")
