"""Writes the bundled classifier training corpus, alternating labels."""
import pathlib

RELEVANT = [
    ("Bird flu outbreak confirmed at poultry farm in Vietnam", "Officials culled 20,000 chickens after H5N1 was detected in samples from the farm."),
    ("Cholera cases rise in Iraq as water supplies fail", "The Ministry of Health reported 300 new cholera infections in Sulaymaniyah this week."),
    ("Horse flu spreads to new properties near Sydney", "Equine influenza has now been confirmed on 47 properties and movement bans remain in place."),
    ("Ebola outbreak kills 150 in Congo", "The World Health Organization said samples confirmed Ebola in Kasai province."),
    ("Dengue fever cases soar in Indonesia", "Hospitals in Jakarta are overwhelmed by patients with dengue after heavy rains."),
    ("Measles outbreak closes schools in Switzerland", "Health officials confirmed 80 cases of measles among unvaccinated children."),
    ("Foot and mouth disease found on second Surrey farm", "Defra imposed a protection zone after FMD was confirmed in cattle."),
    ("Rabies death reported in Bali", "A man died of rabies after a dog bite, prompting a vaccination campaign."),
    ("Meningitis epidemic hits Burkina Faso", "Meningococcal disease has killed more than 200 people since January."),
    ("Two more human H5N1 cases in Indonesia", "The patients had contact with sick poultry before developing fever."),
    ("Marburg fever confirmed in Uganda miner", "Health workers are tracing contacts of the patient who fell ill after working in a mine."),
    ("Chikungunya outbreak spreads in Italy", "Mosquito control teams were deployed after 130 people fell ill with chikungunya fever."),
    ("Typhoid outbreak sickens hundreds in Tajikistan", "Contaminated drinking water is suspected as the source of the typhoid infections."),
    ("Polio case reported in Nigeria", "Wild poliovirus was isolated from a child in Kano state, the ministry said."),
    ("Norovirus outbreak on cruise ship", "More than 300 passengers reported vomiting and diarrhoea caused by norovirus."),
    ("Plague kills villagers in Congo", "Pneumonic plague was suspected in 12 deaths in Ituri district."),
    ("Anthrax outbreak among cattle in Kenya", "Veterinary officers vaccinated herds after anthrax killed 40 animals."),
    ("Yellow fever cases confirmed in Paraguay", "Authorities launched mass vaccination after yellow fever deaths near Asuncion."),
    ("Rift Valley fever outbreak in Sudan", "The outbreak has caused 125 deaths, health officials said on Monday."),
    ("Tuberculosis cluster found at school", "Screening identified 12 students infected with drug-resistant TB."),
    ("Hepatitis A outbreak linked to restaurant", "Health officials urged diners to seek vaccination after hepatitis A cases."),
    ("Mumps outbreak at university", "The health department confirmed 40 cases of mumps among students."),
    ("Legionnaires disease kills two in Spain", "A cooling tower is suspected as the source of the legionella infections."),
    ("Swine flu cases confirmed in Mexico", "Dozens of people were hospitalised with H1N1 influenza, the ministry said."),
    ("Crimean-Congo hemorrhagic fever kills farmer in Turkey", "Officials warned of tick bites after the CCHF death."),
    ("Salmonella outbreak traced to peanut butter", "The CDC said 300 people fell ill with salmonella infection in 39 states."),
    ("Leptospirosis cases rise after floods in Philippines", "Doctors reported 60 patients with leptospirosis following the typhoon."),
    ("Avian influenza detected in wild swans in Germany", "The animal health agency confirmed the H5N1 strain in dead birds."),
    ("Whooping cough outbreak in Australia", "Pertussis notifications doubled this year, the state health department said."),
    ("Japanese encephalitis kills children in India", "More than 400 children have died in the encephalitis outbreak in Uttar Pradesh."),
]

IRRELEVANT = [
    ("Stock markets rally on rate cut hopes", "Shares rose across Asia as investors bet on lower interest rates."),
    ("Flu vaccine maker reports record profits", "The company said quarterly earnings rose on strong demand for its products."),
    ("Camden council approves new library", "The borough will open the building next spring after a public consultation."),
    ("Football club signs striker from Brazil", "The player agreed a four year contract after passing a medical."),
    ("Government unveils health budget", "The minister promised more hospital beds and shorter waiting lists."),
    ("Bird watchers flock to wetlands", "Thousands of migrating birds arrived at the reserve in October."),
    ("Heavy rain floods roads in Jakarta", "Traffic was paralysed as rivers burst their banks after a storm."),
    ("Horse racing season opens in Melbourne", "Trainers said the track was in good condition for the spring carnival."),
    ("Film festival announces award winners", "The jury praised the documentary about life in a mining town."),
    ("Oil prices climb above 90 dollars", "Crude futures rose on supply concerns and a weaker dollar."),
    ("New smartphone goes on sale", "Queues formed outside stores as the device launched in Europe."),
    ("Election campaign enters final week", "Candidates toured marginal seats with promises on tax and schools."),
    ("Pharmaceutical merger creates industry giant", "The deal values the combined drug company at 60 billion dollars."),
    ("Scientists map genome of wheat", "Researchers say the work could help breed drought-tolerant crops."),
    ("Hospital opens new cancer wing", "The unit will treat 2,000 patients a year with modern equipment."),
    ("Tourist numbers rise in Bali", "Hotels reported high occupancy during the holiday season."),
    ("Farmers protest over milk prices", "Dairy producers blocked roads to demand a better deal from supermarkets."),
    ("Cruise line orders three new ships", "The vessels will be delivered from 2010 and carry 4,000 passengers each."),
    ("Minister opens water treatment plant", "The facility will supply clean water to 500,000 residents."),
    ("University ranks among world's best", "The institution climbed ten places in the annual league table."),
    ("Airline cancels flights amid strike", "Thousands of travellers were stranded as cabin crew walked out."),
    ("Zoo welcomes baby elephant", "The calf was born overnight and is said to be healthy."),
    ("Gym membership surges in January", "Fitness chains reported record sign-ups after the holidays."),
    ("Court jails fraudster for six years", "The judge said the businessman had deceived hundreds of investors."),
    ("Earthquake shakes northern Chile", "No damage was reported after the magnitude 5 tremor."),
    ("Research funding for vaccines increased", "The foundation pledged new grants for laboratories working on immunology."),
    ("Celebrity chef opens restaurant in London", "The menu features seasonal produce from local farms."),
    ("Mosquito nets donated to schools", "A charity handed out nets and books to pupils in rural districts."),
    ("Coffee prices fall on bumper harvest", "Brazilian growers expect a record crop this season."),
    ("Telescope captures images of distant galaxy", "Astronomers said the pictures reveal star formation in detail."),
]

assert len(RELEVANT) == len(IRRELEVANT) == 30
lines = ["# label<TAB>headline<TAB>body; 30 relevant and 30 irrelevant, alternating"]
for (rh, rb), (ih, ib) in zip(RELEVANT, IRRELEVANT):
    lines.append(f"relevant\t{rh}\t{rb}")
    lines.append(f"irrelevant\t{ih}\t{ib}")
out = pathlib.Path(__file__).resolve().parent.parent / "crates/core/data/training_corpus.tsv"
out.write_text("\n".join(lines) + "\n")
