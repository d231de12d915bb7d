from enum import Enum


class Language(Enum):
    en = 'en'
    dk = 'dk'


class Texts:
    config_completed = {Language.en: 'Configuration file has been created.',
                        Language.dk: 'Konfigurationsfilen er oprettet.'}
    init_lab = {Language.en: 'Initializing soliton laboratory...',
                Language.dk: 'Initialiserer soliton-laboratoriet...'}
    lab_init = {Language.en: 'Soliton laboratory has been initialized.',
                Language.dk: 'Soliton-laboratoriet er initialiseret.'}
    run_started = {Language.en: 'Starting run: ',
                   Language.dk: 'Starter kørsel: '}
    run_ok = {Language.en: 'OK: The run finished without advisories. Output can be found at the following path: ',
              Language.dk: 'OK: Kørslen er afsluttet uden advarsler. Output kan findes på følgende sti: '}
    run_flag = {Language.en: 'FLAG: The run finished with advisories. Output can be found at the following path: ',
                Language.dk: 'FLAG: Kørslen er afsluttet med advarsler. Output kan findes på følgende sti: '}
    run_nok = {Language.en: 'NOK: The run failed: ',
               Language.dk: 'NOK: Kørslen fejlede: '}
    stability_advisory = {Language.en: 'Stability advisory (step sizes may violate the mesh condition): ',
                          Language.dk: 'Stabilitetsadvarsel (skridtlængderne kan bryde netbetingelsen): '}
    convergence_row = {Language.en: 'Convergence row finished for h = ',
                       Language.dk: 'Konvergensrække afsluttet for h = '}
    convergence_row_failed = {Language.en: 'Convergence row failed for h = ',
                              Language.dk: 'Konvergensrække fejlede for h = '}
    convergence_ok = {Language.en: 'OK: Convergence table written to: ',
                      Language.dk: 'OK: Konvergenstabel skrevet til: '}
    convergence_flag = {Language.en: 'FLAG: Convergence table written with failed rows to: ',
                        Language.dk: 'FLAG: Konvergenstabel skrevet med fejlede rækker til: '}
    profile_ok = {Language.en: 'OK: Profile files written to: ',
                  Language.dk: 'OK: Profilfiler skrevet til: '}
    check_ok = {Language.en: 'OK: All discrete identities hold.',
                Language.dk: 'OK: Alle diskrete identiteter holder.'}
    check_nok = {Language.en: 'NOK: Discrete identities failed: ',
                 Language.dk: 'NOK: Diskrete identiteter fejlede: '}
    interrupted = {Language.en: 'Interrupted by the user (Ctrl+C).',
                   Language.dk: 'Programmet blev afbrudt af brugeren (Ctrl+C).'}
    passed = {Language.en: 'passed',
              Language.dk: 'bestået'}
    failed = {Language.en: 'failed',
              Language.dk: 'fejlet'}
    status = {Language.en: 'Status',
              Language.dk: 'Status'}
    rows = {Language.en: 'Rows',
            Language.dk: 'Rækker'}
    table = {Language.en: 'Table',
             Language.dk: 'Tabel'}
