"""Writes the 30-day replay fixture: a source list and a JSON-lines story stream."""
import json
import pathlib

SOURCES = [
    ("bbc_health", "http://news.bbc.co.uk/rss/health.xml", "press", ""),
    ("abc_rural", "http://www.abc.net.au/news/rural/rss.xml", "press", ""),
    ("reuters_health", "http://www.reuters.com/news/health/rss", "press", ""),
    ("xinhua_en", "http://www.xinhuanet.com/english/rss/health.xml", "press", "CN"),
    ("who_don", "http://www.who.int/feeds/entity/csr/don/en/rss.xml", "official", ""),
    ("promed", "http://www.promedmail.org/rss/latest.xml", "official", ""),
    ("bizwire_health", "http://www.businesswire.com/rss/health.xml", "business", ""),
]

# (published, source, url slug, headline, body)
STORIES = [
    ("2007-10-12T08:10:00Z", "bbc_health", "fmd-1",
     "New foot-and-mouth case confirmed in United Kingdom",
     "Defra said foot-and-mouth disease was confirmed in cattle at a second farm. A protection zone is in place and movement of livestock has been banned while tests continue."),
    ("2007-10-12T14:30:00Z", "promed", "fmd-2",
     "Foot and mouth disease, United Kingdom: new outbreak",
     "The OIE was notified of a further outbreak of foot and mouth disease in cattle. Officials confirmed the strain matches the earlier cases and culling has begun on the farm."),
    ("2007-10-13T09:00:00Z", "reuters_health", "h5n1-id-1",
     "Indonesian woman dies of bird flu in Jakarta",
     "The woman had contact with sick chickens before developing a high fever, the health ministry said. Indonesia has recorded the highest number of human H5N1 deaths in the world."),
    ("2007-10-13T11:45:00Z", "bizwire_health", "biz-1",
     "Vaccine maker reports record quarterly profits",
     "The company said earnings rose on strong demand for its products and announced a new share buyback programme for investors."),
    ("2007-10-14T06:20:00Z", "who_don", "h5n1-id-2",
     "Avian influenza situation in Indonesia",
     "The Ministry of Health of Indonesia has announced a new case of human infection with H5N1 avian influenza in Jakarta. The case was fatal. Investigations into the source of infection are under way and poultry in the area will be tested."),
    ("2007-10-15T10:00:00Z", "promed", "cholera-iq-1",
     "Cholera outbreak in Iraq spreads to Baghdad",
     "Cholera cases have been confirmed in Baghdad after the outbreak that began in Sulaymaniyah. The Ministry of Health reported hundreds of infections linked to contaminated water supplies in the north."),
    ("2007-10-15T16:40:00Z", "who_don", "cholera-iq-2",
     "Cholera in Iraq",
     "As of 14 October, the Ministry of Health of Iraq reported new laboratory confirmed cholera cases in several provinces. The World Health Organization is supporting surveillance and water chlorination."),
    ("2007-10-16T07:15:00Z", "reuters_health", "cholera-iq-3",
     "Cholera kills more in northern Iraq",
     "Health officials said cholera had killed two more people in Sulaymaniyah as the outbreak continued. Residents were urged to boil drinking water."),
    ("2007-10-17T12:00:00Z", "bbc_health", "misc-1",
     "Government unveils health budget for hospitals",
     "The minister promised more hospital beds and shorter waiting lists in a speech to parliament on Tuesday afternoon."),
    ("2007-10-18T08:30:00Z", "who_don", "ebola-cd-1",
     "Ebola outbreak in Democratic Republic of the Congo",
     "The Ministry of Health of the Democratic Republic of the Congo has confirmed an outbreak of Ebola haemorrhagic fever in Kasai Occidental province. Samples tested positive and contacts are being traced."),
    ("2007-10-18T19:10:00Z", "reuters_health", "ebola-cd-2",
     "Ebola kills dozens in Congo",
     "Ebola has killed dozens of people in the Democratic Republic of the Congo, the World Health Organization said. Teams from Kinshasa travelled to the area to support the response."),
    ("2007-10-19T09:40:00Z", "promed", "ebola-cd-3",
     "Ebola haemorrhagic fever, Democratic Republic of the Congo: update",
     "The number of suspected cases of Ebola continues to rise. Laboratory confirmation was obtained for several patients and isolation wards have been established."),
    ("2007-10-20T10:05:00Z", "bbc_health", "rabies-iow-1",
     "Rabies found in bat on Isle of Wight",
     "A bat found on the Isle of Wight has tested positive for rabies, officials confirmed. The Health Protection Agency advised people not to handle bats and offered vaccination to those exposed."),
    ("2007-10-20T15:25:00Z", "reuters_health", "rabies-iow-2",
     "Rabies bat on Isle of Wight prompts warning",
     "Health officials confirmed a rabies infected bat on the Isle of Wight and urged anyone bitten to seek treatment. The risk to the public was described as low."),
    ("2007-10-21T08:00:00Z", "bbc_health", "rabies-iow-3",
     "Isle of Wight rabies bat: vaccinations offered",
     "People who handled the rabies infected bat on the island are being offered vaccination. Officials stressed that rabies in bats is rare and there is no risk from pets."),
    ("2007-10-22T13:00:00Z", "bizwire_health", "biz-2",
     "Pharmaceutical merger creates industry giant",
     "The deal values the combined drug company at 60 billion dollars and is expected to close next year after regulatory approval."),
    ("2007-10-23T07:50:00Z", "promed", "mening-bf-1",
     "Meningitis epidemic in Burkina Faso",
     "Meningococcal disease has killed more than 200 people in Burkina Faso since January. Vaccination campaigns are under way in Ouagadougou and the northern districts."),
    ("2007-10-24T11:30:00Z", "who_don", "polio-ng-1",
     "Wild poliovirus case reported in Kano",
     "A new case of wild poliovirus was isolated from a child in Kano state, Nigeria. Polio eradication teams are planning a new immunization round in the state."),
    ("2007-10-25T06:40:00Z", "abc_rural", "ei-camden-1",
     "Horse flu confirmed at Camden stables",
     "Equine influenza has been detected at a property in Camden, south-west of Sydney. Australia has banned horse movements across the state while testing continues."),
    ("2007-10-25T18:20:00Z", "abc_rural", "ei-camden-2",
     "Camden horse flu outbreak grows",
     "More horses in Camden have tested positive for equine influenza. Officials in Australia said the outbreak was being contained by strict quarantine rules on the properties."),
    ("2007-10-26T09:00:00Z", "reuters_health", "ei-camden-3",
     "Horse flu reaches Camden",
     "Equine flu has been confirmed at stables in Camden, officials said on Friday. Owners were told to keep horses isolated and report any signs of fever."),
    ("2007-10-27T10:10:00Z", "abc_rural", "misc-2",
     "Horse racing season opens in Melbourne",
     "Trainers said the track was in good condition for the spring carnival despite the earlier cancellations of smaller meetings."),
    ("2007-10-28T08:45:00Z", "promed", "chik-it-1",
     "Chikungunya outbreak in Italy",
     "An outbreak of chikungunya fever has been confirmed in Italy with more than 100 cases. Mosquito control teams were deployed in the affected villages near Ravenna."),
    ("2007-10-29T12:15:00Z", "who_don", "marburg-ug-1",
     "Marburg haemorrhagic fever in Uganda",
     "The Ministry of Health of Uganda has confirmed a case of Marburg haemorrhagic fever in a young man who worked in a mine. Contacts are being followed up and Kampala hospitals are on alert."),
    ("2007-10-30T09:30:00Z", "bbc_health", "misc-3",
     "Hospital opens new cancer wing in London",
     "The unit will treat 2,000 patients a year with modern equipment, hospital managers said at the opening ceremony on Monday."),
    ("2007-10-31T14:00:00Z", "reuters_health", "mening-bf-2",
     "Meningitis deaths rise in Burkina Faso",
     "Meningitis has now killed 250 people in Burkina Faso, the health ministry said. Aid agencies are delivering vaccines to clinics in rural areas."),
    ("2007-11-01T07:00:00Z", "xinhua_en", "h5n1-cn-1",
     "China reports H5N1 outbreak in poultry near Beijing",
     "The Ministry of Agriculture said H5N1 bird flu was found in poultry at a farm near Beijing. China has culled thousands of birds in the area and disinfected markets nearby."),
    ("2007-11-01T15:35:00Z", "reuters_health", "h5n1-cn-2",
     "Bird flu found near Beijing",
     "Bird flu was confirmed in poultry near Beijing, state media said, the first outbreak in the area this year. Officials said there were no human cases."),
    ("2007-11-02T08:25:00Z", "xinhua_en", "h5n1-cn-3",
     "Beijing steps up bird flu controls",
     "Beijing has increased inspections of poultry markets after the H5N1 outbreak. Officials said the bird flu situation was under control and no people had fallen ill."),
    ("2007-11-02T13:50:00Z", "bizwire_health", "biz-3",
     "Antiviral maker shares rise on bird flu fears in China",
     "Shares of the antiviral drug maker climbed after reports of bird flu in China, analysts said, citing expectations of higher government orders."),
    ("2007-11-03T10:00:00Z", "promed", "h5n1-cn-4",
     "Avian influenza, poultry: China (Beijing)",
     "Authorities confirmed highly pathogenic avian influenza H5N1 in poultry near Beijing. The outbreak has been reported to the OIE and surveillance has been expanded."),
    ("2007-11-04T09:15:00Z", "bbc_health", "misc-4",
     "Football club signs striker from Brazil",
     "The player agreed a four year contract after passing a medical at the training ground on Sunday morning."),
    ("2007-11-05T06:30:00Z", "reuters_health", "dengue-id-1",
     "Dengue fever cases soar in Jakarta",
     "Hospitals in Jakarta are overwhelmed by patients with dengue fever after heavy rains. Indonesia has recorded more than 100,000 cases this year."),
    ("2007-11-05T17:45:00Z", "who_don", "dengue-id-2",
     "Dengue in Indonesia",
     "The Ministry of Health of Indonesia reported an increase in dengue cases in Jakarta and surrounding provinces. Vector control activities have been intensified."),
    ("2007-11-06T08:00:00Z", "promed", "dengue-id-3",
     "Dengue fever, Indonesia (Jakarta)",
     "Dengue fever cases continue to increase in Jakarta. Health officials urged residents to remove standing water where mosquitoes breed."),
    ("2007-11-06T12:20:00Z", "bbc_health", "tb-gb-1",
     "Tuberculosis cluster found at London school",
     "Screening identified 12 students infected with tuberculosis at a school in London. The Health Protection Agency said the risk to the wider community was low."),
    ("2007-11-07T09:10:00Z", "reuters_health", "measles-ch-1",
     "Measles outbreak closes schools in Switzerland",
     "Health officials confirmed 80 cases of measles among unvaccinated children in Switzerland. Schools in Geneva were closed for a week."),
    ("2007-11-07T18:30:00Z", "promed", "measles-ch-2",
     "Measles, Switzerland: outbreak",
     "The Federal Office of Public Health of Switzerland reported a measles outbreak with more than 80 cases, mostly among unvaccinated children in Geneva."),
    ("2007-11-08T07:40:00Z", "who_don", "cholera-iq-4",
     "Cholera in Iraq - update",
     "The Ministry of Health of Iraq reported additional cholera cases in Baghdad and Basra. The outbreak has affected thousands since August."),
    ("2007-11-08T11:00:00Z", "bizwire_health", "biz-4",
     "Water purification firm wins contract in Iraq",
     "The company said it will supply treatment equipment to several cities under a government contract worth 30 million dollars."),
    ("2007-11-08T20:15:00Z", "reuters_health", "cholera-iq-5",
     "Cholera spreads in Baghdad",
     "Cholera has spread to new districts of Baghdad, officials said. Hospitals reported dozens of patients with severe diarrhoea."),
    ("2007-11-09T06:00:00Z", "bbc_health", "misc-5",
     "Airline cancels flights amid strike",
     "Thousands of travellers were stranded as cabin crew walked out over pay and conditions at several airports."),
    ("2007-11-09T09:50:00Z", "abc_rural", "ei-sydney-1",
     "Equine influenza found north of Sydney",
     "Equine influenza has been confirmed on a property north of Sydney. Australia's horse industry remains under strict movement controls."),
    ("2007-11-09T14:30:00Z", "promed", "polio-ng-2",
     "Poliomyelitis, Nigeria (Kano)",
     "Further cases of wild poliovirus have been confirmed in Kano, Nigeria. Immunization coverage in the state remains low."),
    ("2007-11-10T05:20:00Z", "xinhua_en", "h5n1-cn-5",
     "China confirms new H5N1 outbreak in Guangzhou",
     "Bird flu was found in ducks at a farm in Guangzhou, the Ministry of Agriculture said. China said the outbreak had been contained."),
    ("2007-11-10T08:00:00Z", "reuters_health", "h5n1-cn-6",
     "Bird flu in Guangzhou ducks",
     "Bird flu has been confirmed in ducks near Guangzhou in southern China, officials said. Thousands of birds were culled."),
    ("2007-11-10T10:30:00Z", "who_don", "h5n1-cn-7",
     "Avian influenza situation in China",
     "The Ministry of Agriculture of China has reported an outbreak of H5N1 avian influenza in poultry in Guangzhou. No human cases have been reported."),
    ("2007-11-10T13:45:00Z", "promed", "h5n1-cn-8",
     "Avian influenza situation in China",
     "The Ministry of Agriculture of China has reported an outbreak of H5N1 avian influenza in poultry in Guangzhou. No human cases have been reported."),
    ("2007-11-10T16:10:00Z", "bbc_health", "london-flu-1",
     "Flu cases rise in London",
     "Doctors in London reported a sharp rise in flu cases this week. Officials urged older people to get vaccinated before winter."),
    ("2007-11-10T19:00:00Z", "bizwire_health", "biz-5",
     "Flu vaccine orders climb as season begins",
     "Manufacturers said orders for seasonal flu vaccine rose this year, lifting shares in the sector."),
    ("2007-11-11T01:30:00Z", "reuters_health", "dengue-kh-1",
     "Dengue outbreak in Cambodia",
     "Dengue fever has killed more than 400 children in Cambodia this year, health officials said. Hospitals are treating hundreds of patients."),
    ("2007-11-11T04:00:00Z", "who_don", "marburg-ug-2",
     "Marburg haemorrhagic fever in Uganda - update",
     "No new cases of Marburg haemorrhagic fever have been reported in Uganda. Follow-up of contacts in Kampala is complete."),
    ("2007-11-11T06:15:00Z", "abc_rural", "ei-camden-4",
     "Camden horse flu restrictions eased",
     "Authorities in Australia eased restrictions on horse movements around Camden after no new equine influenza cases were reported."),
    ("2007-11-11T07:00:00Z", "bbc_health", "rabies-iow-4",
     "Second rabies bat found on Isle of Wight",
     "A second bat infected with rabies has been found on the Isle of Wight. Officials repeated advice not to touch bats."),
    ("2007-11-11T08:20:00Z", "promed", "rabies-iow-5",
     "Rabies, bat: United Kingdom (Isle of Wight)",
     "A second bat with rabies was confirmed on the Isle of Wight. The United Kingdom remains free of rabies in terrestrial animals."),
    ("2007-11-11T09:30:00Z", "reuters_health", "measles-ch-3",
     "Measles cases climb in Geneva",
     "Measles cases in Geneva have climbed to more than 100, officials in Switzerland said."),
    ("2007-11-11T10:40:00Z", "bbc_health", "misc-6",
     "Zoo welcomes baby elephant",
     "The calf was born overnight and is said to be healthy, keepers said on Sunday."),
    ("2007-11-11T11:10:00Z", "xinhua_en", "h5n1-cn-9",
     "Guangzhou lifts bird flu curbs",
     "Guangzhou has lifted restrictions on poultry markets after no new bird flu cases were found in China."),
    ("2007-11-11T12:30:00Z", "who_don", "mening-bf-3",
     "Meningococcal disease in Burkina Faso",
     "The Ministry of Health of Burkina Faso reported a decline in new cases of meningococcal disease following vaccination."),
    ("2007-11-11T13:45:00Z", "reuters_health", "tb-gb-2",
     "More tuberculosis cases at London school",
     "Health officials in London confirmed four more tuberculosis cases at the school, bringing the total to 16."),
]

root = pathlib.Path(__file__).resolve().parent.parent / "crates/core/data"
base = {s[0]: s[1].rsplit("/", 1)[0] for s in SOURCES}
with open(root / "replay_sources.tsv", "w") as f:
    f.write("# id<TAB>url<TAB>genre<TAB>country_hint (optional; otherwise from the URL)\n")
    for sid, url, genre, hint in SOURCES:
        f.write("\t".join([sid, url, genre, hint]).rstrip("\t") + "\n")
assert len(STORIES) == len({s[2] for s in STORIES})
with open(root / "replay_stories.jsonl", "w") as f:
    for published, source, slug, headline, body in sorted(STORIES):
        f.write(json.dumps({
            "source": source,
            "url": f"{base[source]}/{slug}.html",
            "headline": headline,
            "body": body,
            "published": published,
        }) + "\n")
print(len(STORIES), "stories")
