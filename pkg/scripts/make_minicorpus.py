"""Regenerate the bundled synthetic mini-corpus.

Writes docs.trec.gz, topics.txt, qrels.txt and glosses.tsv into
src/qexpand/data/minicorpus/. Output is fully determined by SEED.

Each topic has a title, a handful of related words, and hand-written
glosses whose vocabulary overlaps the glosses of the title units. Relevant
documents mix title and related words into background text; some of them
barely mention the title words, so feedback has something to recover.
"""

import gzip
import random
from pathlib import Path

SEED = 20240604
OUT = Path(__file__).resolve().parent.parent / "src" / "qexpand" / "data" / "minicorpus"

TOPICS = [
    (604, "Lyme disease arthritis",
     "Documents on Lyme disease and the arthritis it causes.",
     {
         "lyme_disease": "an acute inflammatory disease caused by bacteria carried by deer ticks, marked by a skin rash, fever and joint swelling",
         "arthritis": "inflammation of a joint or joints causing pain, stiffness and swelling",
         "disease": "an impairment of health or an abnormal condition of the body",
     },
     {
         "tick": "a small parasitic arachnid that sucks blood and carries bacteria causing disease",
         "spondylitis": "inflammation of the vertebrae; a joint disease of the spine",
         "rash": "a skin eruption, often a symptom of an inflammatory disease",
         "joint": "the point of connection between two bones, where inflammation causes swelling",
         "fever": "a rise in body temperature, a symptom of infection or inflammatory disease",
         "bacteria": "single-celled microorganisms, some of which cause infection and disease",
         "antibiotic": "a drug that kills bacteria and cures bacterial infection",
         "deer": "a hoofed ruminant mammal of forests that carries ticks",
         "ill": "affected by disease; in poor health",
     }),
    (316, "polygamy polyandry polygyny",
     "Marriage with more than one spouse.",
     {
         "polygamy": "the practice of having more than one spouse at the same time",
         "polyandry": "the practice of having more than one husband at the same time",
         "polygyny": "the practice of having more than one wife at the same time",
     },
     {
         "monogamy": "the practice of having a single spouse or one marriage partner at a time",
         "polygamist": "a person who practices polygamy, having more than one spouse",
         "widow": "a woman whose spouse or husband has died and who has not remarried",
         "marriage": "the legal union of a husband and wife as spouses",
         "wife": "a married woman; a man's spouse",
         "husband": "a married man; a woman's spouse",
         "children": "young human beings; the sons and daughters of a family",
         "mormon": "a member of a church founded in America that once practiced polygamy",
         "bride": "a woman participant in her own marriage ceremony",
     }),
    (361, "clothing sweatshops",
     "Garment factories with poor working conditions.",
     {
         "clothing": "garments and apparel worn to cover the body",
         "sweatshop": "a shop or factory where workers labor long hours for low wages under poor conditions",
     },
     {
         "garment": "an article of clothing or apparel",
         "factory": "a plant consisting of buildings where workers manufacture goods",
         "wage": "payment to workers for labor, usually by the hour",
         "shop": "a small workplace or factory where goods are made or sold",
         "apparel": "clothing in general; garments worn",
         "sewing": "joining the fabric of garments with thread and a needle",
         "labor": "productive work done by workers for wages",
         "immigrant": "a person who comes to a country to live and work",
     }),
    (301, "oil spill",
     "Accidental release of oil at sea.",
     {
         "oil_spill": "a release of crude petroleum oil into the sea or onto a coast, causing pollution that harms wildlife",
         "oil": "a thick liquid derived from petroleum, used as fuel",
         "spill": "the act of allowing a liquid to run out of a container",
     },
     {
         "tanker": "a ship designed to carry crude oil or petroleum cargo",
         "petroleum": "a dark oily liquid; crude oil from which fuels are refined",
         "slick": "a film of oil floating on the sea",
         "pollution": "contamination of the sea, air or water by harmful substances",
         "cleanup": "the removal of pollution, oil or waste from a coast or site",
         "coast": "the land next to the sea; the shore",
         "wildlife": "animals and birds living in natural conditions",
         "crude": "unrefined petroleum oil in its natural state",
     }),
    (302, "solar energy",
     "Power generated from sunlight.",
     {
         "solar_energy": "energy from the sun converted into heat or electricity by panels",
         "solar": "relating to the sun or its radiation",
         "energy": "power derived from physical or chemical resources to provide light, heat or electricity",
     },
     {
         "photovoltaic": "producing electricity from light or sun radiation in a cell",
         "panel": "a flat sheet of cells that converts sun light into electricity",
         "electricity": "energy made available by the flow of electric charge, used as power",
         "radiation": "energy emitted as rays or waves, as from the sun",
         "renewable": "of energy from a source such as sun or wind that is not depleted",
         "sunlight": "the light and heat radiation of the sun",
         "battery": "a device that stores electricity and supplies power",
     }),
    (303, "antarctic exploration",
     "Expeditions to Antarctica.",
     {
         "antarctic": "of the south polar region and continent covered by ice",
         "exploration": "travel through an unknown region or continent for discovery",
     },
     {
         "expedition": "an organized journey for exploration or discovery",
         "glacier": "a slowly moving mass of ice on land in polar regions",
         "polar": "of the regions around the north or south pole, cold and covered by ice",
         "explorer": "a person who travels through unknown regions for discovery",
         "iceberg": "a large mass of floating ice broken from a glacier",
         "penguin": "a flightless sea bird of the south polar region",
         "continent": "one of the large land masses of the earth",
     }),
    (304, "heart attack",
     "Myocardial infarction, causes and treatment.",
     {
         "heart_attack": "a sudden blockage of a coronary artery that stops blood flow and damages the heart muscle",
         "heart": "the hollow muscular organ that pumps blood through the body",
         "attack": "an offensive against an enemy; a violent assault",
     },
     {
         "coronary": "relating to the arteries that supply blood to the heart",
         "artery": "a blood vessel that carries blood from the heart",
         "cardiac": "relating to the heart or heart disease",
         "cholesterol": "a fatty substance in blood that blocks arteries",
         "infarction": "death of tissue, such as heart muscle, from a blocked blood supply",
         "chest": "the front of the body containing the heart and lungs",
         "cardiologist": "a physician specializing in the heart and blood vessels",
     }),
    (305, "stock market crash",
     "Sudden collapse of share prices.",
     {
         "stock_market": "an exchange where shares of stock are bought and sold by investors",
         "crash": "a sudden large decline of prices or business activity",
     },
     {
         "share": "a unit of ownership in a company traded on an exchange",
         "investor": "a person who invests money in shares or stock to earn profit",
         "exchange": "a market where shares, stock or commodities are traded",
         "decline": "a sudden fall of prices or value",
         "panic": "sudden fear causing investors to sell shares",
         "trading": "the buying and selling of shares, stock or goods",
         "recession": "a decline of economic and business activity",
         "broker": "an agent who buys and sells shares or stock for investors",
     }),
    (306, "Hubble telescope",
     "The orbiting space telescope.",
     {
         "hubble": "an American astronomer who studied galaxies; a space telescope in orbit is named after him",
         "telescope": "an optical instrument with a lens or mirror that makes distant stars appear nearer",
     },
     {
         "astronomy": "the science of stars, planets, galaxies and space",
         "galaxy": "a vast system of stars in space",
         "orbit": "the path of a satellite or planet around a star or the earth in space",
         "mirror": "a polished surface that reflects light, used in an optical instrument",
         "lens": "a piece of glass that focuses light in an optical instrument",
         "astronaut": "a person trained to travel in space",
         "satellite": "an object in orbit around the earth or a planet",
     }),
    (307, "drug trafficking",
     "Illegal narcotics trade.",
     {
         "drug_trafficking": "the illegal trade and smuggling of narcotics such as cocaine",
         "drug": "a substance used as medicine or as a narcotic",
         "trafficking": "illegal buying and selling of goods such as narcotics",
     },
     {
         "cocaine": "an illegal narcotic drug extracted from coca leaves",
         "smuggling": "secretly importing illegal goods across a border",
         "cartel": "a criminal organization that controls the narcotics trade",
         "narcotic": "an illegal drug that dulls the senses and causes addiction",
         "heroin": "a strongly addictive narcotic drug made from morphine",
         "customs": "a government agency that inspects goods crossing a border",
         "addiction": "compulsive dependence on a drug or narcotic",
     }),
    (308, "tropical storm",
     "Hurricanes and cyclones.",
     {
         "tropical_storm": "a storm of strong wind and heavy rain that forms over warm tropical ocean water",
         "tropical": "of the hot region of the earth near the equator",
         "storm": "violent weather with strong wind and rain",
     },
     {
         "hurricane": "a severe tropical storm with violent wind and rain over the ocean",
         "cyclone": "a storm of violent wind rotating around a center of low pressure",
         "flood": "an overflow of water from heavy rain onto land",
         "rainfall": "the amount of rain falling in a region",
         "wind": "air moving across the earth, strong in a storm",
         "evacuation": "moving people away from a place of danger such as a storm or flood",
     }),
    (309, "organic farming",
     "Agriculture without synthetic chemicals.",
     {
         "organic": "grown or raised without synthetic pesticide or chemical fertilizer",
         "farming": "the practice of growing crops and raising livestock on land",
     },
     {
         "crop": "a plant grown and harvested on a farm",
         "pesticide": "a chemical used to kill pests that damage crops",
         "fertilizer": "a chemical or natural substance added to soil to help crops grow",
         "soil": "the upper layer of earth in which crops and plants grow",
         "harvest": "the gathering of ripe crops from the fields",
         "compost": "decayed organic matter added to soil as fertilizer",
         "farmer": "a person who grows crops or raises livestock on a farm",
     }),
    (310, "wildlife poaching",
     "Illegal hunting of protected animals.",
     {
         "wildlife": "animals and birds living in natural conditions",
         "poaching": "illegal hunting or killing of protected animals",
     },
     {
         "elephant": "a very large animal with a trunk and ivory tusks",
         "ivory": "the hard white substance of elephant tusks",
         "rhino": "a large animal with a horn on its nose, hunted for the horn",
         "tusk": "a long pointed tooth of an elephant made of ivory",
         "hunting": "the pursuit and killing of wild animals",
         "ranger": "a guard who protects animals in a park or forest reserve",
         "conservation": "the protection of animals, plants and natural resources",
     }),
    (311, "computer virus",
     "Malicious self-replicating programs.",
     {
         "computer_virus": "a program that copies itself and spreads through a network to damage computer software and data",
         "computer": "a machine that performs calculations and runs programs on data",
         "virus": "an infectious agent that multiplies inside living cells",
     },
     {
         "malware": "software designed to damage or disrupt a computer",
         "hacker": "a person who gains access to a computer network illegally",
         "software": "programs that run on a computer",
         "infection": "invasion by a virus or a harmful program",
         "antivirus": "software that detects and removes a virus from a computer",
         "worm": "a self replicating program that spreads through a computer network",
         "network": "a system of connected computers that share data",
     }),
    (312, "child labor",
     "Employment of children.",
     {
         "child_labor": "the employment of children in factories or hard work for low wages",
         "child": "a young human being; a son or daughter",
     },
     {
         "exploitation": "unfair use of workers or children for profit",
         "employment": "the state of having paid work",
         "apprentice": "a young worker learning a trade",
         "carpet": "a floor covering woven by workers in factories",
         "schooling": "the education of children in school",
         "orphan": "a child whose parents have died",
         "factory": None,
         "children": None,
     }),
    (313, "nuclear waste disposal",
     "Storage of radioactive waste.",
     {
         "nuclear_waste": "radioactive material left over from a nuclear reactor",
         "nuclear": "of the energy released by fission of atoms in a reactor",
         "waste": "material that is discarded as useless",
         "disposal": "the act of getting rid of waste by burial or storage",
     },
     {
         "radioactive": "emitting dangerous radiation from unstable atoms",
         "reactor": "an apparatus producing nuclear energy from fission of uranium",
         "plutonium": "a radioactive element used in nuclear reactors and weapons",
         "uranium": "a radioactive element used as fuel in nuclear reactors",
         "repository": "a place for long term storage of waste",
         "contamination": "pollution by a radioactive or harmful substance",
     }),
    (314, "mad cow disease",
     "Bovine spongiform encephalopathy.",
     {
         "mad": "affected with madness; insane",
         "cow": "a mature female of domestic cattle",
     },
     {
         "cattle": "domesticated bovine animals raised for beef or milk",
         "beef": "meat from cattle",
         "bovine": "relating to cattle or cows",
         "prion": "an infectious protein that causes brain disease in cattle and humans",
         "encephalopathy": "a disease of the brain that alters its function",
         "brain": "the organ of the nervous system inside the skull",
         "slaughter": "the killing of cattle for meat",
     }),
    (315, "greenhouse effect",
     "Global warming by trapped heat.",
     {
         "greenhouse_effect": "warming of the earth surface by atmosphere gases such as carbon dioxide that trap heat",
         "greenhouse": "a glass building in which plants are grown in warm conditions",
         "effect": "a phenomenon that follows and is caused by a previous phenomenon",
     },
     {
         "carbon": "a chemical element found in coal and in carbon dioxide gas",
         "dioxide": "an oxide with two atoms of oxygen, as in carbon dioxide",
         "climate": "the weather conditions of a region over a long period",
         "warming": "an increase in temperature of the earth and atmosphere",
         "atmosphere": "the layer of gases surrounding the earth",
         "emission": "the release of gases such as carbon dioxide into the atmosphere",
         "fossil": "of fuel such as coal or oil formed from ancient remains, producing carbon dioxide",
     }),
    (317, "airport security",
     "Screening passengers and luggage.",
     {
         "airport": "a place where aircraft take off and land, with facilities for passengers",
         "security": "measures taken to guard against attack, terrorism or crime",
     },
     {
         "passenger": "a traveler on an aircraft or vehicle",
         "luggage": "bags and cases carried by a traveler",
         "screening": "the inspection of passengers and luggage for weapons",
         "terrorism": "the use of violence and attack to intimidate for political purposes",
         "baggage": "cases and bags of a traveler",
         "aviation": "the operation of aircraft",
         "hijacking": "the seizure of an aircraft by force",
     }),
    (318, "obesity diet",
     "Weight loss through diet.",
     {
         "obesity": "a condition of having excess body fat and weight",
         "diet": "the food a person eats, often regulated to lose weight",
     },
     {
         "calorie": "a unit of food energy",
         "fat": "a greasy substance in food and in the body, stored as excess weight",
         "nutrition": "the process of taking in food for health and growth",
         "exercise": "physical activity to improve health and reduce weight",
         "overweight": "above a normal or healthy body weight",
         "sugar": "a sweet substance in food with many calories",
         "metabolism": "the chemical processes in the body that convert food into energy",
     }),
]

BACKGROUND = """
government report city year company people country president official week
month plan program public money business political party group national system
member service water area family school house development law policy meeting
economy information research center community local officer project price cost
increase rate industry percent island river mountain village road bridge train
car bus station street building office hotel restaurant church museum library
theater music film book newspaper magazine television radio art game team player
season coach league stadium election vote candidate campaign minister senate
court judge trial lawyer police crime prison army soldier war peace treaty weapon
military navy pilot plane flight ship boat port cargo trade export import tax
budget bank loan debt dollar currency inflation growth job salary union strike
contract agreement deal merger profit revenue sales customer product technology
phone internet science scientist university student teacher class lesson history
culture language religion festival holiday weather summer winter morning evening
night hour minute garden forest field lake sea beach desert county district
mayor council province capital region committee board director manager worker
staff employee spokesman agency department ministry statement announcement
decision proposal debate vote support opposition critic leader chairman
investment fund insurance property estate rent housing construction highway
traffic accident fire damage injury victim hospital doctor nurse patient medicine
""".split()

GLOSS_FILLER = """
thing object activity state person place quality event act group matter
condition part kind body piece amount member form process
""".split()


def plural(word):
    if word.endswith(("s", "x", "ch", "sh")):
        return word + "es"
    if word.endswith("y") and word[-2:-1] not in "aeiou":
        return word[:-1] + "ies"
    return word + "s"


def main():
    rng = random.Random(SEED)
    lexicon = {}
    topics = []
    for tid, title, desc, title_glosses, related in TOPICS:
        for lemma, gloss in title_glosses.items():
            lexicon.setdefault(lemma, gloss)
        words = []
        for lemma, gloss in related.items():
            if gloss is not None:
                lexicon.setdefault(lemma, gloss)
            words.append(lemma)
        topics.append((tid, title, desc, words))

    topic_vocab = {w for _, title, _, words in topics for w in words + title.lower().split()}
    background = [w for w in dict.fromkeys(BACKGROUND) if w not in topic_vocab]
    # zipf-like background weights
    bg_weights = [1.0 / (r + 1) ** 0.9 for r in range(len(background))]
    rng.shuffle(background)

    for w in background[:60]:
        parts = rng.sample(GLOSS_FILLER, 2) + rng.sample(background, 3)
        lexicon.setdefault(w, f"a {parts[0]} or {parts[1]} associated with {parts[2]}, {parts[3]} and {parts[4]}")

    def bg_words(n):
        return rng.choices(background, weights=bg_weights, k=n)

    def inflect(words):
        return [plural(w) if rng.random() < 0.2 and not w.endswith("ing") else w for w in words]

    def render(tokens):
        rng.shuffle(tokens)
        sentences = []
        i = 0
        while i < len(tokens):
            n = rng.randint(7, 14)
            chunk = tokens[i:i + n]
            i += n
            if rng.random() < 0.15:
                chunk.insert(rng.randrange(len(chunk) + 1), str(rng.randint(2, 1999)))
            s = " ".join(chunk)
            if len(chunk) > 4 and rng.random() < 0.3:
                cut = s.index(" ", len(s) // 2) if " " in s[len(s) // 2:] else len(s)
                s = s[:cut] + "," + s[cut:]
            sentences.append(s[0].upper() + s[1:] + ".")
        return " ".join(sentences)

    docs = []  # (text, topic, grade)
    for k, (tid, title, _, related) in enumerate(topics):
        title_words = title.lower().split()
        for j in range(10):
            mismatch = j >= 7  # relevant, but the title words are rare
            toks = []
            for w in title_words:
                if rng.random() < (0.2 if mismatch else 0.9):
                    toks += [w] * rng.randint(1, 2 if mismatch else 4)
            rel = rng.sample(related, rng.randint(min(4, len(related)), len(related)))
            for w in rel:
                toks += [w] * rng.randint(1, 4)
            toks = inflect(toks)
            toks += bg_words(rng.randint(70, 180))
            docs.append((render(toks), tid, 1))
        for j in range(4):
            other = topics[(k + 1 + j * 3) % len(topics)]
            toks = [rng.choice(title_words)] * rng.randint(1, 2)
            for w in rng.sample(other[3], 4):
                toks += [w] * rng.randint(1, 3)
            toks = inflect(toks)
            toks += bg_words(rng.randint(70, 180))
            docs.append((render(toks), tid, 0))
    while len(docs) < 500:
        toks = bg_words(rng.randint(80, 200))
        if rng.random() < 0.3:
            toks += [rng.choice(rng.choice(topics)[3])] * rng.randint(1, 2)
        docs.append((render(inflect(toks)), None, None))

    order = list(range(len(docs)))
    rng.shuffle(order)
    qrels = []
    lines = []
    judged_bg = {tid: [] for tid, *_ in topics}
    for n, i in enumerate(order, 1):
        text, tid, grade = docs[i]
        docno = f"MINI-{n:04d}"
        words = text.split()
        headline = " ".join(words[:6]).rstrip(".,")
        lines.append(f"<DOC>\n<DOCNO> {docno} </DOCNO>\n<HEADLINE>\n{headline}\n</HEADLINE>\n<TEXT>\n{text}\n</TEXT>\n</DOC>\n")
        if tid is not None:
            qrels.append((tid, docno, grade))
        else:
            for t in judged_bg:
                if rng.random() < 0.02:
                    judged_bg[t].append(docno)
    for t, dnos in judged_bg.items():
        qrels += [(t, d, 0) for d in dnos]

    OUT.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(OUT / "docs.trec.gz", "wb", mtime=0) as fh:
        fh.write("".join(lines).encode("utf-8"))
    with open(OUT / "topics.txt", "w") as fh:
        for tid, title, desc, _ in sorted(topics):
            fh.write(f"<top>\n\n<num> Number: {tid}\n<title> {title}\n\n<desc> Description:\n{desc}\n\n"
                     f"<narr> Narrative:\nA relevant document discusses {title.lower()}.\n\n</top>\n\n")
    with open(OUT / "qrels.txt", "w") as fh:
        for tid, docno, grade in sorted(qrels):
            fh.write(f"{tid} 0 {docno} {grade}\n")
    with open(OUT / "glosses.tsv", "w") as fh:
        for lemma in sorted(lexicon):
            fh.write(f"{lemma}\t{lexicon[lemma]}\n")
    print(f"{len(lines)} docs, {len(topics)} topics, {len(qrels)} qrels, {len(lexicon)} lexicon entries")


if __name__ == "__main__":
    main()
